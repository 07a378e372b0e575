"""Multi-floor site model: occupancy grids, named goal poses, elevator shafts.

Cells are (col, row) pairs; occupancy arrays are indexed [row, col] with row 0
first, matching the map file's ``occupied_rows`` strings. A site map is
immutable once loaded.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError, UnknownLocation, ValidationError

Cell = tuple[int, int]

TWO_PI = 2.0 * math.pi

DEFAULT_ELEVATOR_COST = 5.0


@dataclass(frozen=True)
class FloorGrid:
    floor_id: str
    width: int
    height: int
    resolution_m: float
    occupied: np.ndarray  # bool, shape (height, width)

    def in_bounds(self, cell: Cell) -> bool:
        col, row = cell
        return 0 <= col < self.width and 0 <= row < self.height

    def is_free(self, cell: Cell) -> bool:
        col, row = cell
        return self.in_bounds(cell) and not self.occupied[row, col]


@dataclass(frozen=True)
class GoalPose:
    floor_id: str
    cell: Cell
    heading_rad: float = 0.0


@dataclass(frozen=True)
class ShaftStop:
    floor_id: str
    cell: Cell


@dataclass(frozen=True)
class ElevatorShaft:
    shaft_id: str
    stops: tuple[ShaftStop, ...]

    def stop_on(self, floor_id: str) -> ShaftStop | None:
        for stop in self.stops:
            if stop.floor_id == floor_id:
                return stop
        return None


@dataclass(frozen=True)
class Location:
    location_id: str
    display_name: str
    pose: GoalPose


@dataclass(frozen=True)
class SiteMap:
    floors: dict[str, FloorGrid]
    locations: dict[str, Location]
    shafts: tuple[ElevatorShaft, ...] = ()
    elevator_cost: float = DEFAULT_ELEVATOR_COST
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def floor(self, floor_id: str) -> FloorGrid:
        try:
            return self.floors[floor_id]
        except KeyError:
            raise ValidationError(f"unknown floor {floor_id!r}") from None


def resolve_location(site: SiteMap, location_id: str) -> GoalPose:
    """Preset pose of a named location. Ids are case-sensitive exact matches."""
    loc = site.locations.get(location_id)
    if loc is None:
        raise UnknownLocation(f"no location {location_id!r} in site map")
    return loc.pose


def display_name(site: SiteMap, location_id: str) -> str:
    loc = site.locations.get(location_id)
    if loc is None:
        raise UnknownLocation(f"no location {location_id!r} in site map")
    return loc.display_name


# ---------------------------------------------------------------------------
# loading


def _require(doc: dict, key: str, typ, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = doc[key]
    if typ is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{where}: field {key!r} must be a number")
        return float(value)
    if typ is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaError(f"{where}: field {key!r} must be an integer")
        return value
    if not isinstance(value, typ):
        raise SchemaError(f"{where}: field {key!r} must be {typ.__name__}")
    return value


def _parse_cell(raw, where: str) -> Cell:
    if (
        not isinstance(raw, (list, tuple))
        or len(raw) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw)
    ):
        raise SchemaError(f"{where}: field 'cell' must be a [col, row] integer pair")
    return (raw[0], raw[1])


def _parse_floor(doc: dict) -> FloorGrid:
    where = f"floor {doc.get('id', '?')!r}"
    floor_id = _require(doc, "id", str, "floor")
    width = _require(doc, "width", int, where)
    height = _require(doc, "height", int, where)
    resolution = _require(doc, "resolution_m", float, where)
    rows = _require(doc, "occupied_rows", list, where)
    if width <= 0 or height <= 0:
        raise ValidationError(f"{where}: width and height must be positive")
    if resolution <= 0:
        raise ValidationError(f"{where}: resolution_m must be positive")
    if len(rows) != height:
        raise SchemaError(f"{where}: expected {height} occupied_rows, got {len(rows)}")
    grid = np.zeros((height, width), dtype=bool)
    for r, row in enumerate(rows):
        if not isinstance(row, str) or len(row) != width or set(row) - {"0", "1"}:
            raise SchemaError(
                f"{where}: occupied_rows[{r}] must be a string of {width} '0'/'1' characters"
            )
        grid[r] = [ch == "1" for ch in row]
    if grid.all():
        raise ValidationError(f"{where}: no free cell")
    return FloorGrid(floor_id=floor_id, width=width, height=height,
                     resolution_m=resolution, occupied=grid)


def load_site_map(document: str | dict) -> SiteMap:
    """Parse and fully validate a site map document (JSON text or dict)."""
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"map document is not valid JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("map document must be a JSON object")

    floor_docs = _require(doc, "floors", list, "map")
    if not floor_docs:
        raise ValidationError("map: needs at least one floor")
    floors: dict[str, FloorGrid] = {}
    for fd in floor_docs:
        if not isinstance(fd, dict):
            raise SchemaError("map: each floor must be an object")
        grid = _parse_floor(fd)
        if grid.floor_id in floors:
            raise ValidationError(f"duplicate floor id {grid.floor_id!r}")
        floors[grid.floor_id] = grid

    def check_cell(floor_id: str, cell: Cell, who: str) -> None:
        grid = floors.get(floor_id)
        if grid is None:
            raise ValidationError(f"{who}: references unknown floor {floor_id!r}")
        if not grid.in_bounds(cell):
            raise ValidationError(f"{who}: cell {list(cell)} outside floor {floor_id!r} bounds")
        if not grid.is_free(cell):
            raise ValidationError(f"{who}: cell {list(cell)} on floor {floor_id!r} is occupied")

    locations: dict[str, Location] = {}
    for ld in doc.get("locations", []):
        if not isinstance(ld, dict):
            raise SchemaError("map: each location must be an object")
        loc_id = _require(ld, "id", str, "location")
        where = f"location {loc_id!r}"
        name = _require(ld, "display_name", str, where)
        floor_id = _require(ld, "floor", str, where)
        cell = _parse_cell(ld.get("cell"), where)
        heading = float(ld.get("heading_rad", 0.0))
        if not 0.0 <= heading < TWO_PI:
            raise ValidationError(f"{where}: heading_rad must lie in [0, 2*pi)")
        if loc_id in locations:
            raise ValidationError(f"duplicate location id {loc_id!r}")
        check_cell(floor_id, cell, where)
        locations[loc_id] = Location(
            location_id=loc_id,
            display_name=name,
            pose=GoalPose(floor_id=floor_id, cell=cell, heading_rad=heading),
        )

    shafts: list[ElevatorShaft] = []
    seen_shaft_ids: set[str] = set()
    for sd in doc.get("shafts", []):
        if not isinstance(sd, dict):
            raise SchemaError("map: each shaft must be an object")
        shaft_id = _require(sd, "id", str, "shaft")
        where = f"shaft {shaft_id!r}"
        if shaft_id in seen_shaft_ids:
            raise ValidationError(f"duplicate shaft id {shaft_id!r}")
        seen_shaft_ids.add(shaft_id)
        stop_docs = _require(sd, "stops", list, where)
        if len(stop_docs) < 2:
            raise ValidationError(f"{where}: needs at least 2 stops")
        stops: list[ShaftStop] = []
        floors_served: set[str] = set()
        for stop_doc in stop_docs:
            if not isinstance(stop_doc, dict):
                raise SchemaError(f"{where}: each stop must be an object")
            floor_id = _require(stop_doc, "floor", str, where)
            cell = _parse_cell(stop_doc.get("cell"), where)
            if floor_id in floors_served:
                raise ValidationError(f"{where}: more than one stop on floor {floor_id!r}")
            floors_served.add(floor_id)
            check_cell(floor_id, cell, where)
            stops.append(ShaftStop(floor_id=floor_id, cell=cell))
        shafts.append(ElevatorShaft(shaft_id=shaft_id, stops=tuple(stops)))

    cost = doc.get("elevator_cost", DEFAULT_ELEVATOR_COST)
    if not isinstance(cost, (int, float)) or isinstance(cost, bool) or cost < 0:
        raise SchemaError("map: elevator_cost must be a nonnegative number")

    return SiteMap(
        floors=floors,
        locations=locations,
        shafts=tuple(shafts),
        elevator_cost=float(cost),
        source=doc,
    )


def site_description(site: SiteMap) -> dict:
    """Map-file-shaped dict describing the site, for the gateway map endpoint."""
    return {
        "floors": [
            {
                "id": g.floor_id,
                "width": g.width,
                "height": g.height,
                "resolution_m": g.resolution_m,
                "occupied_rows": [
                    "".join("1" if g.occupied[r, c] else "0" for c in range(g.width))
                    for r in range(g.height)
                ],
            }
            for g in site.floors.values()
        ],
        "locations": [
            {
                "id": loc.location_id,
                "display_name": loc.display_name,
                "floor": loc.pose.floor_id,
                "cell": list(loc.pose.cell),
                "heading_rad": loc.pose.heading_rad,
            }
            for loc in site.locations.values()
        ],
        "shafts": [
            {
                "id": s.shaft_id,
                "stops": [{"floor": st.floor_id, "cell": list(st.cell)} for st in s.stops],
            }
            for s in site.shafts
        ],
        "elevator_cost": site.elevator_cost,
    }
