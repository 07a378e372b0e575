"""Simulated guided-walk executor.

The robot is a small state machine over Idle / Navigating / Stopped. Goals
replan from the current cell (latest goal wins), stop holds in place until a
new goal arrives, and each tick advances a fixed number of waypoints along
the planned path, crossing elevator shafts instantaneously with a floor
change. Every tick publishes a state snapshot.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Union

from .errors import Unreachable, UnknownLocation, ValidationError
from .messages import TOPIC_SAY, TOPIC_STATE, GoalMsg, SpeechOutMsg, StateMsg
from .planner import Path, flatten_path, plan_path
from .sitemap import Cell, GoalPose, SiteMap, display_name

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

ARRIVAL_TEMPLATE = "You have arrived at the {name}."
UNREACHABLE_TEMPLATE = "Sorry, I cannot reach the {name}."


@dataclass(frozen=True)
class Idle:
    pass


@dataclass(frozen=True)
class Stopped:
    pass


@dataclass(frozen=True)
class Navigating:
    goal: GoalMsg
    path: Path
    flat: tuple[tuple[str, Cell], ...]  # flattened (floor, cell) waypoints
    next_index: int                     # next waypoint to move to; == len(flat) at goal


Status = Union[Idle, Stopped, Navigating]


@dataclass(frozen=True)
class RobotState:
    floor_id: str
    cell: Cell
    heading_rad: float
    status: Status


@dataclass(frozen=True)
class SimConfig:
    start: GoalPose
    tick_ms: int = 100
    cells_per_tick: int = 1

    def __post_init__(self):
        if self.tick_ms <= 0:
            raise ValidationError("tick_ms must be positive")
        if self.cells_per_tick < 1:
            raise ValidationError("cells_per_tick must be at least 1")


def initial_state(site: SiteMap, cfg: SimConfig) -> RobotState:
    grid = site.floor(cfg.start.floor_id)
    if not grid.is_free(cfg.start.cell):
        raise ValidationError(
            f"start cell {list(cfg.start.cell)} on floor {cfg.start.floor_id!r} is not free"
        )
    return RobotState(
        floor_id=cfg.start.floor_id,
        cell=cfg.start.cell,
        heading_rad=cfg.start.heading_rad,
        status=Idle(),
    )


def _name_for(site: SiteMap, location_id: str) -> str:
    try:
        return display_name(site, location_id)
    except UnknownLocation:
        return location_id


def on_goal(state: RobotState, goal: GoalMsg, site: SiteMap, bus) -> RobotState:
    """Replan from the current cell toward the goal's preset pose.

    An unreachable or invalid goal leaves the state untouched and apologizes
    on speech.say; it never raises.
    """
    pose = GoalPose(floor_id=goal.floor_id, cell=goal.cell, heading_rad=goal.heading_rad)
    try:
        path = plan_path(site, (state.floor_id, state.cell), pose)
    except (Unreachable, ValidationError) as exc:
        logger.warning("goal %r rejected: %s", goal.location_id, exc)
        bus.publish(TOPIC_SAY, SpeechOutMsg(
            text=UNREACHABLE_TEMPLATE.format(name=_name_for(site, goal.location_id))
        ))
        return state
    return replace(state, status=Navigating(
        goal=goal, path=path, flat=flatten_path(path), next_index=1,
    ))


def on_stop(state: RobotState) -> RobotState:
    """Hold at the current cell; also arms a hold from Idle."""
    return replace(state, status=Stopped())


def _heading_of_move(a: Cell, b: Cell) -> float:
    return math.atan2(b[1] - a[1], b[0] - a[0]) % TWO_PI


def state_msg(state: RobotState) -> StateMsg:
    if isinstance(state.status, Navigating):
        return StateMsg(
            floor_id=state.floor_id,
            cell=state.cell,
            heading_rad=state.heading_rad,
            status="navigating",
            goal_location_id=state.status.goal.location_id,
            path=state.status.path.as_dict(),
        )
    label = "stopped" if isinstance(state.status, Stopped) else "idle"
    return StateMsg(
        floor_id=state.floor_id,
        cell=state.cell,
        heading_rad=state.heading_rad,
        status=label,
    )


def tick(state: RobotState, cfg: SimConfig, site: SiteMap, bus) -> RobotState:
    """Advance one tick and publish the resulting state snapshot.

    Navigating moves up to cells_per_tick waypoints; reaching the final
    waypoint adopts the goal heading, announces arrival and goes Idle.
    Idle and Stopped are fixed points.
    """
    if isinstance(state.status, Navigating):
        nav = state.status
        floor_id, cell, heading = state.floor_id, state.cell, state.heading_rad
        idx = nav.next_index
        for _ in range(cfg.cells_per_tick):
            if idx >= len(nav.flat):
                break
            next_floor, next_cell = nav.flat[idx]
            if next_floor == floor_id:
                heading = _heading_of_move(cell, next_cell)
            floor_id, cell = next_floor, next_cell
            idx += 1
        if idx >= len(nav.flat):
            # at the goal cell: adopt goal heading and report
            state = RobotState(
                floor_id=floor_id, cell=cell,
                heading_rad=nav.goal.heading_rad, status=Idle(),
            )
            bus.publish(TOPIC_SAY, SpeechOutMsg(
                text=ARRIVAL_TEMPLATE.format(name=_name_for(site, nav.goal.location_id))
            ))
        else:
            state = RobotState(
                floor_id=floor_id, cell=cell, heading_rad=heading,
                status=replace(nav, next_index=idx),
            )
    bus.publish(TOPIC_STATE, state_msg(state))
    return state
