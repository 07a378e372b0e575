// DOM wiring: one socket in, one command box out, canvas per active floor.

import { GatewayClient } from "./client.js";
import { drawFloor } from "./render.js";
import {
  activeFloor,
  applyStream,
  initialView,
  markCommanded,
  markFailed,
  markIgnored,
  operatorSaid,
  pinFloor,
  setConnection,
  setMap,
  type ViewState,
} from "./state.js";

const params = new URLSearchParams(location.search);
const gatewayUrl = params.get("gateway") ?? location.origin;
const client = new GatewayClient(gatewayUrl);

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const tabs = document.getElementById("floor-tabs")!;
const banner = document.getElementById("banner")!;
const logBox = document.getElementById("log")!;
const input = document.getElementById("utterance") as HTMLInputElement;
const sendButton = document.getElementById("send") as HTMLButtonElement;
const statusLine = document.getElementById("status-line")!;

let view: ViewState = initialView();

function update(next: ViewState): void {
  view = next;
  render();
}

function renderTabs(): void {
  if (!view.map) return;
  tabs.textContent = "";
  const follow = document.createElement("button");
  follow.textContent = "follow robot";
  follow.className = view.pinnedFloor === null ? "tab active" : "tab";
  follow.onclick = () => update(pinFloor(view, null));
  tabs.appendChild(follow);
  for (const floor of view.map.floors) {
    const tab = document.createElement("button");
    tab.textContent = floor.id;
    tab.className = view.pinnedFloor === floor.id ? "tab active" : "tab";
    tab.onclick = () => update(pinFloor(view, floor.id));
    tabs.appendChild(tab);
  }
}

function renderLog(): void {
  logBox.textContent = "";
  for (const entry of view.log) {
    const div = document.createElement("div");
    if (entry.who === "robot") {
      div.className = "bubble robot";
      div.textContent = entry.text;
    } else {
      div.className = `bubble operator ${entry.status}`;
      div.textContent = entry.text;
      if (entry.note) {
        const note = document.createElement("span");
        note.className = "note";
        note.textContent = ` — ${entry.note}`;
        div.appendChild(note);
      }
    }
    logBox.appendChild(div);
  }
  logBox.scrollTop = logBox.scrollHeight;
}

function renderStatus(): void {
  banner.hidden = view.connection === "open";
  banner.textContent =
    view.connection === "lost"
      ? "connection lost — view may be stale, reconnecting…"
      : "connecting…";
  const s = view.lastState;
  statusLine.textContent = s
    ? `floor ${s.floor_id} · cell (${s.cell[0]}, ${s.cell[1]}) · ${s.status}` +
      (s.goal_location_id ? ` → ${s.goal_location_id}` : "")
    : "waiting for first state…";
}

function render(): void {
  renderTabs();
  renderLog();
  renderStatus();
  const floorId = activeFloor(view);
  if (view.map && floorId) drawFloor(ctx, view, view.map, floorId);
  sendButton.disabled = input.value.trim() === "";
}

async function send(): Promise<void> {
  const text = input.value.trim();
  if (!text) return;
  const { view: next, index } = operatorSaid(view, text);
  update(next);
  input.value = "";
  try {
    const reply = await client.sendUtterance(text);
    update(reply.outcome === "ignored" ? markIgnored(view, index) : markCommanded(view, index));
  } catch (err) {
    update(markFailed(view, index, `send failed: ${String(err)}`));
    input.value = text; // preserve the utterance for retry
  }
  render();
}

sendButton.onclick = () => void send();
input.oninput = () => render();
input.onkeydown = (ev) => {
  if (ev.key === "Enter") void send();
};

client.connectStream({
  onMessage: (msg) => update(applyStream(view, msg)),
  onStatus: (status) => update(setConnection(view, status)),
});

client
  .fetchMap()
  .then((map) => update(setMap(view, map)))
  .catch((err) => {
    banner.hidden = false;
    banner.textContent = `cannot load map from ${gatewayUrl}: ${String(err)}`;
  });

render();
