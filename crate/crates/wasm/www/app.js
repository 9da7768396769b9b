// Drives the wasm simulator: reads the controls, calls the exported
// operations, and draws paths, histograms, and sweep curves on canvases.
// Build the pkg/ directory first; see the README.

import init, {
  landmarks_json,
  trajectory_json,
  histogram_json,
  sweep_json,
} from "./pkg/kramers_reset_wasm.js";

const $ = (id) => document.getElementById(id);
const status = (msg) => { $("status").textContent = msg; };

const ALPHA = 6.0;
const BETA = 1.0;

function params() {
  const kind = $("kind").value;
  const v = parseFloat($("resetval").value);
  const reset = kind === "none" ? "none" : kind === "det" ? `det:${v}` : `poisson:${v}`;
  return {
    x0: parseFloat($("x0").value),
    eps: parseFloat($("eps").value),
    eta: parseFloat($("eta").value),
    reset,
    seed: parseInt($("seed").value, 10) >>> 0,
  };
}

// --- tiny plotting helpers -------------------------------------------------

function frame(canvas, xmin, xmax, ymin, ymax) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const m = { l: 44, r: 8, t: 8, b: 24 };
  const sx = (x) => m.l + ((x - xmin) / (xmax - xmin)) * (canvas.width - m.l - m.r);
  const sy = (y) => canvas.height - m.b - ((y - ymin) / (ymax - ymin)) * (canvas.height - m.t - m.b);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(m.l, m.t, canvas.width - m.l - m.r, canvas.height - m.t - m.b);
  ctx.fillStyle = "#667";
  ctx.font = "11px system-ui";
  ctx.textAlign = "center";
  for (let i = 0; i <= 4; i++) {
    const x = xmin + (i * (xmax - xmin)) / 4;
    ctx.fillText(x.toPrecision(3), sx(x), canvas.height - 8);
  }
  ctx.textAlign = "right";
  for (let i = 0; i <= 4; i++) {
    const y = ymin + (i * (ymax - ymin)) / 4;
    ctx.fillText(y.toPrecision(3), m.l - 4, sy(y) + 4);
  }
  return { ctx, sx, sy };
}

function polyline(f, pts, color, width = 1.2) {
  const { ctx, sx, sy } = f;
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(sx(x), sy(y)) : ctx.lineTo(sx(x), sy(y))));
  ctx.stroke();
}

function hline(f, y, color, dash = [5, 4]) {
  const { ctx, sy } = f;
  ctx.save();
  ctx.setLineDash(dash);
  ctx.strokeStyle = color;
  ctx.beginPath();
  ctx.moveTo(44, sy(y));
  ctx.lineTo(ctx.canvas.width - 8, sy(y));
  ctx.stroke();
  ctx.restore();
}

// --- operations -------------------------------------------------------------

function drawTrajectory() {
  const p = params();
  const out = JSON.parse(trajectory_json(ALPHA, BETA, p.eta, p.eps, p.x0, p.reset, p.seed, 400.0, 5));
  if (out.error) { status(out.error); return; }
  status("");

  const path = out.path;
  const tmax = path[path.length - 1].t;
  const xs = path.map((q) => q.x);
  const vs = path.map((q) => q.v);
  const xmin = Math.min(-3.4, ...xs), xmax = Math.max(6.2, ...xs);

  // x(t)
  const ft = frame($("c-time"), 0, Math.max(tmax, 1e-6), xmin, xmax);
  hline(ft, 6.0, "#b33");
  hline(ft, out.resets.length ? p.x0 : -3.0, "#aac");
  polyline(ft, path.map((q) => [q.t, q.x]), "#235");
  ft.ctx.fillStyle = "#b33";
  out.resets.forEach((t) => {
    ft.ctx.fillRect(ft.sx(t) - 1, 8, 2, ft.ctx.canvas.height - 32);
  });

  // phase space
  const fp = frame($("c-phase"), xmin, xmax, Math.min(...vs, -1), Math.max(...vs, 1));
  polyline(fp, path.map((q) => [q.x, q.v]), "#235", 0.8);
  fp.ctx.fillStyle = "#b33";
  fp.ctx.beginPath();
  fp.ctx.arc(fp.sx(p.x0), fp.sy(0), 4, 0, 7);
  fp.ctx.fill();

  $("s-traj").textContent = out.censored
    ? `no escape within the viewing window; resets: ${out.n_resets}`
    : `first passage at t = ${out.fpt.toFixed(3)} after ${out.n_resets} reset(s)`;
}

function drawHistogram() {
  const p = params();
  status("running 4000 trajectories...");
  setTimeout(() => {
    const out = JSON.parse(histogram_json(ALPHA, BETA, p.eta, p.eps, p.x0, p.reset, p.seed, 4000, 0.25));
    if (out.error) { status(out.error); return; }
    status("");
    const edges = out.edges, rf = out.rf;
    // show up to the 99th percentile so the long tail does not flatten the view
    let cum = 0, cut = edges.length - 1;
    for (let i = 0; i < rf.length; i++) { cum += rf[i]; if (cum > 0.99) { cut = i; break; } }
    const tmax = edges[Math.min(cut + 2, edges.length - 1)] + out.bin_width;
    const ymax = Math.max(...rf) * 1.1;
    const f = frame($("c-hist"), 0, tmax, 0, ymax);
    f.ctx.fillStyle = "#46a";
    for (let i = 0; i < edges.length && edges[i] < tmax; i++) {
      const x0px = f.sx(edges[i]);
      const x1px = f.sx(Math.min(edges[i] + out.bin_width, tmax));
      f.ctx.fillRect(x0px, f.sy(rf[i]), Math.max(x1px - x0px - 0.5, 0.5), f.sy(0) - f.sy(rf[i]));
    }
    $("s-hist").textContent =
      `MFPT = ${out.mfpt.toFixed(3)} ± ${out.ci95.toFixed(3)} (95% CI)   sigma = ${out.std_dev.toFixed(3)}   ` +
      `CV = ${out.cv.toFixed(3)}\nmin FPT = ${out.min_fpt.toFixed(3)}   escaped by t=20: ${(100 * out.frac_by_20).toFixed(1)}%` +
      (out.cv > 1 ? "   (CV > 1: resetting to x0 helps)" : "   (CV < 1: resetting to x0 hurts)");
  }, 20);
}

function drawSweep() {
  const p = params();
  const kind = $("kind").value === "poisson" ? "theta" : "tr";
  status(`sweeping ${kind === "tr" ? "t_r" : "theta"} at 1200 trajectories per point...`);
  setTimeout(() => {
    const out = JSON.parse(sweep_json(ALPHA, BETA, p.eta, p.eps, p.x0, kind, 1.4, 0.4, 8.2, 1200, p.seed));
    if (out.error) { status(out.error); return; }
    status("");
    const pts = out.points;
    const xs = pts.map((q) => q.c);
    const lo = Math.min(...pts.map((q) => q.mean - q.ci), out.baseline) * 0.9;
    const hi = Math.max(...pts.map((q) => q.mean + q.ci), out.baseline) * 1.05;
    const f = frame($("c-sweep"), Math.min(...xs), Math.max(...xs), Math.max(lo, 0), hi);
    hline(f, out.baseline, "#888");
    polyline(f, pts.map((q) => [q.c, q.mean]), "#a33", 1.5);
    f.ctx.strokeStyle = "#a33";
    pts.forEach((q) => {
      f.ctx.beginPath();
      f.ctx.moveTo(f.sx(q.c), f.sy(q.mean - q.ci));
      f.ctx.lineTo(f.sx(q.c), f.sy(q.mean + q.ci));
      f.ctx.stroke();
    });
    const label = kind === "tr" ? "t_r" : "theta";
    const best = out.global_min
      ? `noise-aware minimum at ${label} = ${out.global_min[0]} (MFPT ${out.global_min[1].toFixed(2)}, ` +
        `${(100 * out.ratio_at_global).toFixed(0)}% of the no-reset MFPT ${out.baseline.toFixed(2)})`
      : `no CI-separated minimum at this sample size; baseline MFPT = ${out.baseline.toFixed(2)}`;
    $("s-sweep").textContent = best;
  }, 20);
}

async function main() {
  await init();
  const lm = JSON.parse(landmarks_json(ALPHA, BETA));
  status(`ready - barrier top x+ = ${lm.x_plus}, well edge x- = ${lm.x_minus}, E0 = ${lm.barrier_height}`);

  $("x0").addEventListener("input", () => { $("x0v").textContent = $("x0").value; });
  $("eps").addEventListener("input", () => { $("epsv").textContent = $("eps").value; });
  const busy = (fn) => () => {
    document.querySelectorAll("button").forEach((b) => (b.disabled = true));
    try { fn(); } finally {
      setTimeout(() => document.querySelectorAll("button").forEach((b) => (b.disabled = false)), 50);
    }
  };
  $("btn-traj").addEventListener("click", busy(drawTrajectory));
  $("btn-hist").addEventListener("click", busy(drawHistogram));
  $("btn-sweep").addEventListener("click", busy(drawSweep));
  drawTrajectory();
}

main().catch((e) => status(`failed to load wasm module: ${e}`));
