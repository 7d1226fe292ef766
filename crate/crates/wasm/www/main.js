import init, { scan, trajectory, cobweb } from "./pkg/linarg_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

const COLORS = {
  repelling_origin: "#d9534f",
  local_basin: "#f0ad4e",
  global_convergence: "#5cb85c",
  outside_range: "#999",
  invalid: "#ddd",
};

function call(f, ...args) {
  try {
    $("error").textContent = "";
    return JSON.parse(f(...args));
  } catch (e) {
    $("error").textContent = String(e);
    return null;
  }
}

// Linear map from data box to canvas pixels, y pointing up.
function frame(canvas, xmin, xmax, ymin, ymax, pad = 30) {
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  return {
    x: (v) => pad + ((v - xmin) / (xmax - xmin)) * w,
    y: (v) => pad + h - ((v - ymin) / (ymax - ymin)) * h,
    inv: (px) => xmin + ((px - pad) / w) * (xmax - xmin),
  };
}

function axes(ctx, f, xmin, xmax, ymin, ymax) {
  ctx.strokeStyle = "#bbb";
  ctx.lineWidth = 1;
  ctx.beginPath();
  if (ymin <= 0 && ymax >= 0) {
    ctx.moveTo(f.x(xmin), f.y(0));
    ctx.lineTo(f.x(xmax), f.y(0));
  }
  if (xmin <= 0 && xmax >= 0) {
    ctx.moveTo(f.x(0), f.y(ymin));
    ctx.lineTo(f.x(0), f.y(ymax));
  }
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui";
  ctx.fillText(xmin.toPrecision(3), f.x(xmin), f.y(ymin) + 14);
  ctx.fillText(xmax.toPrecision(3), f.x(xmax) - 24, f.y(ymin) + 14);
  ctx.fillText(ymax.toPrecision(3), 2, f.y(ymax) + 4);
  ctx.fillText(ymin.toPrecision(3), 2, f.y(ymin));
}

function polyline(ctx, xs, ys, f, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(f.x(x), f.y(ys[i])) : ctx.moveTo(f.x(x), f.y(ys[i]))));
  ctx.stroke();
}

let scanFrame = null;

function drawScan() {
  const amin = num("amin");
  const amax = num("amax");
  const data = call(scan, num("b"), num("sigma"), amin, amax, num("points"));
  if (!data) return;
  const canvas = $("scan");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const taus = data.points.map((p) => (p.regime.regime === "local_basin" ? p.regime.tau : null));
  const tmax = Math.max(1, ...taus.filter((t) => t !== null).map((t) => Math.min(t, 50)));
  const f = frame(canvas, amin, amax, 0, tmax * 1.1);
  scanFrame = f;
  const step = (f.x(amax) - f.x(amin)) / Math.max(1, data.points.length - 1);
  for (const p of data.points) {
    ctx.fillStyle = COLORS[p.regime.regime] || "#000";
    ctx.fillRect(f.x(p.a) - step / 2, f.y(0), step + 0.5, 10);
  }
  const pts = data.points.filter((p, i) => taus[i] !== null && taus[i] <= 50);
  polyline(ctx, pts.map((p) => p.a), pts.map((p) => p.regime.tau), f, "#b36b00");
  axes(ctx, f, amin, amax, 0, tmax * 1.1);
  const a = num("a");
  ctx.strokeStyle = "#000";
  ctx.setLineDash([4, 3]);
  ctx.beginPath();
  ctx.moveTo(f.x(a), f.y(0));
  ctx.lineTo(f.x(a), f.y(tmax * 1.1));
  ctx.stroke();
  ctx.setLineDash([]);
}

function drawTrajectory() {
  const data = call(trajectory, num("a"), num("b"), num("sigma"), num("xprev"), num("x0"), num("steps"));
  if (!data) return;
  $("regime").textContent =
    "regime: " + data.regime.replace(/_/g, " ") + (data.tau !== null ? `, τ = ${data.tau.toPrecision(8)}` : "");
  const canvas = $("traj");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const tn = data.n.slice(1);
  const finite = data.x.concat(data.t).filter(Number.isFinite);
  const ymax = Math.max(1e-9, ...finite.map(Math.abs)) * 1.1;
  const f = frame(canvas, data.n[0], data.n[data.n.length - 1], -ymax, ymax);
  axes(ctx, f, data.n[0], data.n[data.n.length - 1], -ymax, ymax);
  polyline(ctx, data.n, data.x, f, "#1f77b4");
  polyline(ctx, tn, data.t, f, "#ff7f0e");
}

function drawCobweb() {
  const extent = num("extent");
  const data = call(cobweb, num("a"), num("b"), num("sigma"), num("t0"), num("csteps"), extent);
  if (!data) return;
  const canvas = $("cobweb");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const f = frame(canvas, -extent, extent, -extent, extent);
  axes(ctx, f, -extent, extent, -extent, extent);
  polyline(ctx, [-extent, extent], [-extent, extent], f, "#ccc");
  polyline(ctx, [-extent, extent], [extent, -extent], f, "#eee");
  polyline(ctx, data.curve.map((p) => p[0]), data.curve.map((p) => p[1]), f, "#1f77b4");
  if (data.tau !== null && data.tau < extent) {
    ctx.fillStyle = "#b36b00";
    for (const s of [-1, 1]) {
      ctx.beginPath();
      ctx.arc(f.x(s * data.tau), f.y(-s * data.tau), 4, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
  const xs = [];
  const ys = [];
  let prev = data.orbit[0];
  xs.push(prev);
  ys.push(0);
  for (const t of data.orbit.slice(1)) {
    xs.push(prev, t);
    ys.push(t, t);
    prev = t;
  }
  const clip = (v) => Math.max(-extent, Math.min(extent, v));
  polyline(ctx, xs.map(clip), ys.map(clip), f, "#d62728");
}

function redrawAll() {
  drawScan();
  drawTrajectory();
  drawCobweb();
}

await init();
for (const id of ["a", "b", "sigma"]) $(id).addEventListener("change", redrawAll);
$("run-scan").addEventListener("click", drawScan);
$("run-traj").addEventListener("click", drawTrajectory);
$("run-cobweb").addEventListener("click", drawCobweb);
$("scan").addEventListener("click", (ev) => {
  if (!scanFrame) return;
  const rect = ev.target.getBoundingClientRect();
  const px = ((ev.clientX - rect.left) * ev.target.width) / rect.width;
  $("a").value = scanFrame.inv(px).toFixed(3);
  redrawAll();
});
redrawAll();
