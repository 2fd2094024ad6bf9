/**
 * App entry point: wires the socket client, state machine, throttled
 * pointer-to-surface targeting, record/playback controls, and the three.js
 * view. All robot state rendered here came from server state frames.
 */
import { TeleopClient } from "./client.js";
import { initialPose, rotate, zoom, type OrbitPose } from "./camera.js";
import { applyServerMessage, contextComplete, initialState, saveEnabled, type SceneState } from "./state.js";
import { buildSceneBuffers } from "./scene.js";
import { pointerToSurface } from "./surface.js";
import { makeThrottle } from "./throttle.js";
import { TeleopView } from "./view.js";
import type { Vec3 } from "./protocol.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("scene");
const banner = $<HTMLDivElement>("banner");
const contextInput = $<HTMLInputElement>("context");
const modelInput = $<HTMLInputElement>("model");
const residualOut = $<HTMLSpanElement>("residual");
const statusOut = $<HTMLSpanElement>("status");

let state: SceneState = initialState();
let orbit: OrbitPose = initialPose("eight_plane");
const view = new TeleopView(canvas);

function parseContext(): number[] {
  return contextInput.value
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map(Number);
}

function refresh(): void {
  view.update(buildSceneBuffers(state));
  view.applyOrbit(orbit);
  view.render();
  residualOut.textContent = state.pose ? `${(state.pose.residual * 1000).toFixed(2)} mm` : "-";
  statusOut.textContent = state.recording
    ? `recording (${state.recordedPath.length} pts)`
    : state.lastSavedIndex !== null
      ? `saved #${state.lastSavedIndex}`
      : "idle";
  $<HTMLButtonElement>("save").disabled = !saveEnabled(state, contextComplete(state, parseContext()));
  if (state.lastError) {
    banner.textContent = `${state.lastError.code}: ${state.lastError.msg}`;
    banner.hidden = false;
  } else {
    banner.hidden = true;
  }
}

const url = new URL(window.location.href);
const wsUrl = url.searchParams.get("ws") ?? `ws://${url.host}/ws`;
const client = new TeleopClient(new WebSocket(wsUrl), {
  onMessage: (msg) => {
    state = applyServerMessage(state, msg);
    if (msg.type === "env") orbit = initialPose(msg.descriptor.schema);
    refresh();
  },
  onOpen: () => {
    banner.hidden = true;
    client.send({ type: "init" });
  },
  onClose: () => {
    banner.textContent = "disconnected";
    banner.hidden = false;
  },
});

const sendTarget = makeThrottle<Vec3>((p) => {
  client.send({ type: "target", p });
}, 60);

let dragging = false;
let orbiting = false;
let lastPointer: [number, number] = [0, 0];

canvas.addEventListener("pointerdown", (ev) => {
  lastPointer = [ev.clientX, ev.clientY];
  if (ev.button === 0 && !ev.shiftKey) dragging = true;
  else orbiting = true;
});
window.addEventListener("pointerup", () => {
  dragging = false;
  orbiting = false;
  sendTarget.cancel();
});
canvas.addEventListener("wheel", (ev) => {
  orbit = zoom(orbit, Math.exp(ev.deltaY * 1e-3));
  refresh();
});
canvas.addEventListener("pointermove", (ev) => {
  const dx = ev.clientX - lastPointer[0];
  const dy = ev.clientY - lastPointer[1];
  lastPointer = [ev.clientX, ev.clientY];
  if (orbiting) {
    orbit = rotate(orbit, -dx * 5e-3, dy * 5e-3);
    refresh();
    return;
  }
  if (!dragging || !state.env || !client.connected) return;
  const rect = canvas.getBoundingClientRect();
  const ray = view.pointerRay(
    ((ev.clientX - rect.left) / rect.width) * 2 - 1,
    -((ev.clientY - rect.top) / rect.height) * 2 + 1,
  );
  const hit = pointerToSurface(ray, state.env);
  if (hit === null) return; // off-surface: no message
  state = { ...state, target: hit };
  sendTarget.push(hit);
  refresh();
});

$<HTMLButtonElement>("set-context").addEventListener("click", () => {
  client.send({ type: "context", values: parseContext() });
});
$<HTMLButtonElement>("start").addEventListener("click", () => {
  client.send({ type: "record", action: "start" });
});
$<HTMLButtonElement>("stop").addEventListener("click", () => {
  client.send({ type: "record", action: "stop" });
});
$<HTMLButtonElement>("save").addEventListener("click", () => {
  client.send({ type: "record", action: "save" });
});
$<HTMLButtonElement>("reset").addEventListener("click", () => {
  client.send({ type: "reset" });
});
$<HTMLButtonElement>("playback").addEventListener("click", () => {
  client.send({
    type: "playback",
    model: modelInput.value,
    context: parseContext(),
    cadence: 0.05,
  });
});
contextInput.addEventListener("input", refresh);

refresh();
