import init, { tilt_sweep, band_sinr, channel_heatmap, mode_count } from "./pkg/oam_wasm.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c"];
const NAMES = ["misaligned", "analog", "digital"];
const $ = (id) => document.getElementById(id);

function bounds(values) {
  const finite = values.filter(Number.isFinite);
  let lo = Math.min(...finite), hi = Math.max(...finite);
  if (lo === hi) { lo -= 1; hi += 1; }
  return [lo, hi];
}

// series: [{x: [], y: [], color, dash}]
function plot(canvas, series, xLabel, yLabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, m = { l: 60, r: 10, t: 10, b: 36 };
  ctx.clearRect(0, 0, w, h);
  const [x0, x1] = bounds(series.flatMap((s) => s.x));
  const [y0, y1] = bounds(series.flatMap((s) => s.y));
  const sx = (x) => m.l + ((x - x0) / (x1 - x0)) * (w - m.l - m.r);
  const sy = (y) => h - m.b - ((y - y0) / (y1 - y0)) * (h - m.t - m.b);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.strokeRect(m.l, m.t, w - m.l - m.r, h - m.t - m.b);
  for (let i = 0; i <= 4; i++) {
    const y = y0 + ((y1 - y0) * i) / 4, x = x0 + ((x1 - x0) * i) / 4;
    ctx.fillText(y.toPrecision(3), 4, sy(y) + 4);
    ctx.fillText(x.toPrecision(4), sx(x) - 12, h - m.b + 14);
  }
  ctx.fillText(xLabel, w / 2 - 20, h - 4);
  ctx.save();
  ctx.translate(12, h / 2 + 30);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash || []);
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let pen = false;
    s.x.forEach((x, i) => {
      const y = s.y[i];
      if (!Number.isFinite(y)) { pen = false; return; }
      pen ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y));
      pen = true;
    });
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function legend(el, entries) {
  el.innerHTML = entries.map(([c, t]) => `<span style="color:${c}">■ ${t}</span>`).join("");
}

function guarded(f) {
  return () => {
    try { $("err").textContent = ""; f(); } catch (e) { $("err").textContent = String(e); }
  };
}

const drawTiltSweep = guarded(() => {
  const max = Number($("ts-max").value), steps = Number($("ts-steps").value);
  $("ts-max-v").textContent = max;
  const rows = tilt_sweep(max, steps);
  const stride = 7, n = rows.length / stride;
  const col = (c) => Array.from({ length: n }, (_, i) => rows[i * stride + c]);
  const x = col(0);
  const series = [];
  for (let s = 0; s < 3; s++) {
    series.push({ x, y: col(1 + 2 * s).map(Math.log10), color: COLORS[s] });
    series.push({ x, y: col(2 + 2 * s).map(Math.log10), color: COLORS[s], dash: [5, 4] });
  }
  plot($("ts-plot"), series, "tilt α = γ (deg)", "log10 power");
  legend($("ts-legend"), NAMES.map((t, i) => [COLORS[i], `${t} (solid: gain, dashed: interference)`]));
});

const drawBand = guarded(() => {
  const tilt = Number($("bs-tilt").value);
  $("bs-tilt-v").textContent = tilt;
  const rows = band_sinr(tilt, Number($("bs-mode").value), Number($("bs-dec").value));
  const stride = 4, n = rows.length / stride;
  const col = (c) => Array.from({ length: n }, (_, i) => rows[i * stride + c]);
  const x = col(0);
  plot($("bs-plot"), [1, 2, 3].map((c, i) => ({ x, y: col(c), color: COLORS[i] })), "frequency (GHz)", "SINR (dB)");
  legend($("bs-legend"), NAMES.map((t, i) => [COLORS[i], t]));
});

const drawHeatmap = guarded(() => {
  const a = Number($("hm-a").value), g = Number($("hm-g").value), p = Number($("hm-p").value);
  $("hm-a-v").textContent = a;
  $("hm-g-v").textContent = g;
  $("hm-p-v").textContent = p;
  const u = mode_count();
  const values = channel_heatmap(a, g, $("hm-s").value, p);
  const db = Array.from(values, (v) => 10 * Math.log10(Math.max(v, 1e-12)));
  const top = Math.max(...db), floor = top - 60;
  const canvas = $("hm-plot"), ctx = canvas.getContext("2d"), cell = canvas.width / u;
  db.forEach((v, i) => {
    const t = Math.min(1, Math.max(0, (v - floor) / (top - floor)));
    ctx.fillStyle = `hsl(${240 - 240 * t}, 80%, ${20 + 45 * t}%)`;
    ctx.fillRect((i % u) * cell, Math.floor(i / u) * cell, cell, cell);
  });
  let diag = 0, off = 0;
  values.forEach((v, i) => (i % u === Math.floor(i / u) ? (diag += v) : (off += v)));
  $("hm-note").textContent =
    `rows: received mode, columns: transmitted mode; colour spans ${floor.toFixed(0)}..${top.toFixed(0)} dB. ` +
    `total interference / total gain = ${(off / diag).toExponential(2)}`;
});

await init();
const modes = mode_count();
for (let i = 0; i < modes; i++) {
  const l = i - Math.floor(modes / 2);
  $("bs-mode").add(new Option(String(l), String(l), l === 1, l === 1));
}
for (const id of ["ts-max", "ts-steps"]) $(id).addEventListener("input", drawTiltSweep);
for (const id of ["bs-tilt", "bs-mode", "bs-dec"]) $(id).addEventListener("input", drawBand);
for (const id of ["hm-a", "hm-g", "hm-s", "hm-p"]) $(id).addEventListener("input", drawHeatmap);
drawTiltSweep();
drawBand();
drawHeatmap();
