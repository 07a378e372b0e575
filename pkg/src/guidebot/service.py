"""Operator-facing gateway service.

Wraps one live session behind HTTP + WebSocket:

* ``GET /map`` — the loaded site map, in the map-file schema.
* ``GET /state`` — latest robot state snapshot.
* ``POST /utterances`` — inject ``{"text": "..."}``; replies with the
  handling outcome so consoles can mark ignored utterances.
* ``WS /ws`` — stream of ``{"t", "kind", "payload"}`` messages for every
  robot.state and speech.say event; the socket also accepts the same
  injection payload and answers with ``{"kind": "outcome", ...}``.

Malformed console input gets a per-message error reply and never disturbs
the session.
"""

from __future__ import annotations

import asyncio
import logging
import threading
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .messages import TOPIC_SAY, TOPIC_STATE
from .msgbus import drain_merged
from .session import Session
from .sitemap import site_description
from .speechflow import GoTo, HandleOutcome, Stop, Unknown

logger = logging.getLogger(__name__)

STREAM_POLL_S = 0.02


class UtteranceIn(BaseModel):
    text: str = Field(description="one utterance of recognized or typed text")
    confidence: Optional[float] = Field(default=None, ge=0.0, le=1.0)


class UtteranceReply(BaseModel):
    outcome: str  # "commanded" | "ignored"
    intent: Optional[dict] = None
    response: Optional[str] = None


def intent_payload(intent) -> Optional[dict]:
    if isinstance(intent, GoTo):
        return {"kind": "go_to", "location_id": intent.location_id}
    if isinstance(intent, Stop):
        return {"kind": "stop"}
    if isinstance(intent, Unknown):
        return {"kind": "unknown", "tokens": list(intent.remainder)}
    return None


def outcome_payload(outcome: HandleOutcome) -> dict:
    return {
        "outcome": "commanded" if outcome.commanded else "ignored",
        "intent": intent_payload(outcome.intent),
        "response": outcome.response,
    }


def create_app(session: Session, ticker: bool = True, static_dir=None) -> FastAPI:
    """Build the gateway app around an existing session.

    With ``ticker`` the session advances in real time on a daemon thread for
    as long as the app runs; tests disable it and tick manually.
    """
    stop_event = threading.Event()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        thread = None
        if ticker:
            thread = threading.Thread(
                target=session.run_forever, args=(stop_event,), daemon=True,
                name="session-ticker",
            )
            thread.start()
        yield
        stop_event.set()
        if thread is not None:
            thread.join(timeout=2.0)

    app = FastAPI(title="guidebot gateway", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.session = session

    @app.get("/map")
    def get_map() -> dict:
        return site_description(session.site)

    @app.get("/state")
    def get_state() -> dict:
        return {"t": session.ticks, "kind": "state", "payload": session.state_payload()}

    @app.post("/utterances", response_model=UtteranceReply)
    def post_utterance(body: UtteranceIn) -> UtteranceReply:
        outcome = session.inject(body.text, confidence=body.confidence)
        return UtteranceReply(**outcome_payload(outcome))

    @app.websocket("/ws")
    async def stream(ws: WebSocket) -> None:
        await ws.accept()
        state_sub = session.bus.subscribe(TOPIC_STATE)
        say_sub = session.bus.subscribe(TOPIC_SAY)
        send_lock = asyncio.Lock()

        async def pump_out():
            while True:
                for env in drain_merged(state_sub, say_sub):
                    message = {
                        "t": session.ticks,
                        "kind": env.payload.kind,
                        "payload": env.payload.as_dict(),
                    }
                    async with send_lock:
                        await ws.send_json(message)
                await asyncio.sleep(STREAM_POLL_S)

        async def pump_in():
            while True:
                raw = await ws.receive_json()
                try:
                    body = UtteranceIn.model_validate(raw)
                    outcome = await asyncio.to_thread(
                        session.inject, body.text, body.confidence
                    )
                    reply = {"kind": "outcome", "payload": outcome_payload(outcome)}
                except WebSocketDisconnect:
                    raise
                except Exception as exc:
                    reply = {"kind": "error", "payload": {"message": str(exc)}}
                async with send_lock:
                    await ws.send_json(reply)

        tasks = [asyncio.create_task(pump_out()), asyncio.create_task(pump_in())]
        try:
            done, _ = await asyncio.wait(tasks, return_when=asyncio.FIRST_EXCEPTION)
            for task in done:
                exc = task.exception()
                if exc is not None and not isinstance(exc, WebSocketDisconnect):
                    logger.exception("stream task failed", exc_info=exc)
        finally:
            for task in tasks:
                task.cancel()
            session.bus.unsubscribe(state_sub)
            session.bus.unsubscribe(say_sub)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
