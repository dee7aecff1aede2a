import init, { trace_curve, inverse_warp, mean_value } from "./pkg/dini_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// Maps data coordinates in [xlo, xhi] x [ylo, yhi] to canvas pixels.
function frame(canvas, xlo, xhi, ylo, yhi) {
  const pad = 20;
  const w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  const s = Math.min(w / (xhi - xlo || 1), h / (yhi - ylo || 1));
  const ox = pad + (w - s * (xhi - xlo)) / 2, oy = pad + (h - s * (yhi - ylo)) / 2;
  return {
    s,
    px: (x) => ox + s * (x - xlo),
    py: (y) => canvas.height - (oy + s * (y - ylo)),
  };
}

function bounds(points) {
  let xlo = Infinity, xhi = -Infinity, ylo = Infinity, yhi = -Infinity;
  for (const [x, y] of points) {
    xlo = Math.min(xlo, x); xhi = Math.max(xhi, x);
    ylo = Math.min(ylo, y); yhi = Math.max(yhi, y);
  }
  return [xlo, xhi, ylo, yhi];
}

function show(prefix, text, isError) {
  const el = $(prefix + "-info");
  el.textContent = text;
  el.className = isError ? "info error" : "info";
}

function run(prefix, call, draw) {
  const doc = JSON.parse(call());
  const ctx = $(prefix + "-canvas").getContext("2d");
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  if (doc.error) {
    show(prefix, doc.error, true);
    return;
  }
  show(prefix, draw(ctx, doc), false);
}

function drawCurve(ctx, doc) {
  const f = frame(ctx.canvas, doc.x_lo, doc.x_hi, doc.y_lo, doc.y_hi);
  const rows = doc.field.length, cols = doc.field[0].length;
  const cw = (doc.x_hi - doc.x_lo) / (cols - 1), ch = (doc.y_hi - doc.y_lo) / (rows - 1);
  doc.field.forEach((row, i) => row.forEach((sign, j) => {
    ctx.fillStyle = sign > 0 ? "#fde2c8" : sign < 0 ? "#cfe3f7" : "#eee";
    const x = doc.x_lo + (j - 0.5) * cw, y = doc.y_lo + (i + 0.5) * ch;
    ctx.fillRect(f.px(x), f.py(y), f.s * cw + 1, f.s * ch + 1);
  }));
  ctx.strokeStyle = "#555";
  ctx.strokeRect(f.px(doc.x_lo), f.py(doc.y_hi), f.s * (doc.x_hi - doc.x_lo), f.s * (doc.y_hi - doc.y_lo));
  ctx.strokeStyle = "#c00";
  ctx.lineWidth = 2;
  ctx.beginPath();
  doc.points.forEach((p, k) => (k ? ctx.lineTo : ctx.moveTo).call(ctx, f.px(p.x), f.py(p.y)));
  ctx.stroke();
  ctx.lineWidth = 1;
  const mid = doc.points[Math.floor(doc.points.length / 2)];
  return `box x in (${doc.x_lo.toFixed(4)}, ${doc.x_hi.toFixed(4)}), ` +
    `y in [${doc.y_lo.toFixed(4)}, ${doc.y_hi.toFixed(4)}] after ${doc.shrinks} shrinks\n` +
    (mid ? `at x = ${mid.x.toFixed(4)}: y = ${mid.y.toFixed(6)}, dy/dx = ${mid.slope.toFixed(6)}` : "");
}

function drawWarp(ctx, doc) {
  const pts = doc.lines.flat().filter((p) => p);
  const [xlo, xhi, ylo, yhi] = bounds(pts);
  const f = frame(ctx.canvas, xlo, xhi, ylo, yhi);
  const half = doc.lines.length / 2;
  doc.lines.forEach((line, k) => {
    ctx.strokeStyle = k < half ? "#1f5fa8" : "#b5541c";
    ctx.beginPath();
    let pen = false;
    for (const p of line) {
      if (!p) { pen = false; continue; }
      pen ? ctx.lineTo(f.px(p[0]), f.py(p[1])) : ctx.moveTo(f.px(p[0]), f.py(p[1]));
      pen = true;
    }
    ctx.stroke();
  });
  const missing = doc.lines.flat().length - pts.length;
  return `y box [${doc.y_lo.map((v) => v.toFixed(4))}] to [${doc.y_hi.map((v) => v.toFixed(4))}], ` +
    `centre ${doc.q.map((v) => v.toFixed(4))}\n` +
    `${pts.length} grid points inverted` + (missing ? `, ${missing} outside the domain` : "");
}

function drawMvt(ctx, doc) {
  const [xlo, xhi, ylo, yhi] = bounds(doc.curve);
  const f = frame(ctx.canvas, xlo, xhi, ylo, yhi);
  ctx.strokeStyle = "#222";
  ctx.beginPath();
  doc.curve.forEach(([x, y], k) => (k ? ctx.lineTo : ctx.moveTo).call(ctx, f.px(x), f.py(y)));
  ctx.stroke();
  const [a, fa] = doc.curve[0], [b, fb] = doc.curve[doc.curve.length - 1];
  ctx.strokeStyle = "#888";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(f.px(a), f.py(fa));
  ctx.lineTo(f.px(b), f.py(fb));
  ctx.stroke();
  ctx.setLineDash([]);
  // Tangent at c, through the nearest plotted point.
  const near = doc.curve.reduce((best, p) => (Math.abs(p[0] - doc.c) < Math.abs(best[0] - doc.c) ? p : best));
  const yc = near[1] + doc.secant_slope * (doc.c - near[0]);
  const d = (xhi - xlo) / 4;
  ctx.strokeStyle = "#c00";
  ctx.beginPath();
  ctx.moveTo(f.px(doc.c - d), f.py(yc - doc.secant_slope * d));
  ctx.lineTo(f.px(doc.c + d), f.py(yc + doc.secant_slope * d));
  ctx.stroke();
  return `c = ${doc.c.toPrecision(10)} (t = ${doc.t.toPrecision(6)}), ` +
    `secant slope ${doc.secant_slope.toPrecision(8)}, residual ${doc.residual.toExponential(2)}`;
}

await init();

$("curve-run").onclick = () => run("curve",
  () => trace_curve($("curve-f").value, num("curve-x0"), num("curve-y0"), num("curve-h"), 200, 60),
  drawCurve);
$("warp-run").onclick = () => run("warp",
  () => inverse_warp($("warp-f1").value, $("warp-f2").value, num("warp-p1"), num("warp-p2"), 11, 40),
  drawWarp);
$("mvt-run").onclick = () => run("mvt",
  () => mean_value($("mvt-f").value, num("mvt-a"), num("mvt-b"), 200),
  drawMvt);

for (const id of ["curve-run", "warp-run", "mvt-run"]) $(id).click();
