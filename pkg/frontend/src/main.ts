/**
 * Operator console page: intensity knob, slit selector, which-path toggle,
 * and a scatter display that accumulates detections from a running session.
 */

import { ServiceClient } from "./client.js";
import { ScreenTransform } from "./render.js";
import {
  Console,
  knobForRate,
  rateForKnob,
  slitChanges,
  slitSelectionOf,
  type SlitSelection,
} from "./state.js";

const SERVICE_URL = `http://${location.hostname}:8723`;
const WIDTH_PX = 640;
const HEIGHT_PX = 360;
const HALF_WIDTH_M = 0.2;
const HALF_HEIGHT_M = 0.05;

const app = document.querySelector<HTMLDivElement>("#app")!;
app.innerHTML = `
  <h1>Two-slit operator console</h1>
  <div id="banner" hidden></div>
  <div class="panel">
    <button id="bind">New session</button>
    <span id="sessionLabel">not bound</span>
    <span id="staleDot" title="last poll failed" hidden>stale</span>
  </div>
  <div class="panel">
    <button id="start">Start</button>
    <button id="stop">Stop</button>
    <label>intensity
      <input id="intensity" type="range" min="0" max="8" step="1" value="2">
      <span id="rateLabel"></span>
    </label>
    <label>slits
      <select id="slits">
        <option value="both">both</option>
        <option value="left">left only</option>
        <option value="right">right only</option>
        <option value="closed">closed</option>
      </select>
    </label>
    <label><input id="whichPath" type="checkbox"> mark path</label>
  </div>
  <canvas id="screen" width="${WIDTH_PX}" height="${HEIGHT_PX}"></canvas>
  <div class="panel">
    <span id="countLabel">0 detections</span>
    <span id="sourceLabel"></span>
  </div>
`;

const canvas = document.getElementById("screen") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner") as HTMLDivElement;
const sessionLabel = document.getElementById("sessionLabel")!;
const staleDot = document.getElementById("staleDot")!;
const intensity = document.getElementById("intensity") as HTMLInputElement;
const rateLabel = document.getElementById("rateLabel")!;
const slits = document.getElementById("slits") as HTMLSelectElement;
const whichPath = document.getElementById("whichPath") as HTMLInputElement;
const countLabel = document.getElementById("countLabel")!;
const sourceLabel = document.getElementById("sourceLabel")!;

const transform = new ScreenTransform(WIDTH_PX, HEIGHT_PX, HALF_WIDTH_M, HALF_HEIGHT_M);
const console_ = new Console(new ServiceClient(SERVICE_URL), transform);

function clearScreen() {
  ctx.fillStyle = "#10151b";
  ctx.fillRect(0, 0, WIDTH_PX, HEIGHT_PX);
}

console_.onDisplay = (events) => {
  ctx.fillStyle = "rgba(140, 235, 170, 0.45)";
  for (const event of events) {
    ctx.fillRect(transform.colFor(event.x_m), transform.rowFor(event.y_m), 2, 2);
  }
};

console_.onState = () => {
  banner.hidden = console_.banner === null;
  banner.textContent = console_.banner ?? "";
  sessionLabel.textContent = console_.session
    ? `session ${console_.session.id} (seed ${console_.session.seed})`
    : "not bound";
  staleDot.hidden = !console_.stale;
  countLabel.textContent = `${console_.buffer.count} detections`;
  // The source description is shown exactly as the service states it.
  sourceLabel.textContent = console_.source
    ? `source: ${console_.source.state_form} [${console_.source.mode}]`
    : "";
  const mirror = console_.mirror;
  if (mirror !== null) {
    intensity.value = String(knobForRate(mirror.rate));
    rateLabel.textContent = `${mirror.rate}/s`;
    slits.value = slitSelectionOf(mirror);
    whichPath.checked = mirror.which_path;
  }
};

document.getElementById("bind")!.addEventListener("click", async () => {
  clearScreen();
  await console_.bind();
});

document.getElementById("start")!.addEventListener("click", () => void console_.start());
document.getElementById("stop")!.addEventListener("click", () => void console_.stop());

intensity.addEventListener("change", () => {
  void console_.requestControls({ rate: rateForKnob(Number(intensity.value)) });
});

slits.addEventListener("change", () => {
  void console_.requestControls(slitChanges(slits.value as SlitSelection));
});

whichPath.addEventListener("change", () => {
  void console_.requestControls({ which_path: whichPath.checked });
});

async function pollLoop() {
  await console_.pollOnce();
  setTimeout(pollLoop, console_.pollDelayMs);
}

clearScreen();
void console_.bind().then(() => pollLoop());
