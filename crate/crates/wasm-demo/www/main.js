import init, { homCoincidence, gateSummary, fidelityCurve, tauCount, matrixDim } from "./pkg/mismatch_qpt_wasm.js";

const REFERENCE = [-0.30, 0.50, -0.55, 0.10, -0.45];
const ROWS = ["00", "01", "10", "11", "++", "+-", "-+", "--"];
const $ = (id) => document.getElementById(id);

function plot(canvas, xs, ys, yMax, marker) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 24;
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - (y / yMax) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#666";
  ctx.fillText(yMax.toFixed(1), 2, pad + 4);
  ctx.fillText("0", 8, h - pad + 4);
  ctx.fillText(x0.toString(), pad, h - 6);
  ctx.fillText(x1.toString(), w - pad - 10, h - 6);
  ctx.strokeStyle = "#1f5fa8";
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
  ctx.stroke();
  if (marker) {
    ctx.fillStyle = "#c33";
    ctx.beginPath();
    ctx.arc(px(marker[0]), py(marker[1]), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function updateHom() {
  const d = parseFloat($("delay").value);
  const p = homCoincidence(d);
  $("delay-out").value = `${d.toFixed(2)}  coincidence ${p.toFixed(4)}`;
  const xs = Array.from({ length: 161 }, (_, i) => -4 + i * 0.05);
  plot($("hom"), xs, xs.map(homCoincidence), 0.5, [d, p]);
}

function currentTau() {
  return Float64Array.from(document.querySelectorAll("#sliders input"), (s) => parseFloat(s.value));
}

function updateGate() {
  const tau = currentTau();
  document.querySelectorAll("#sliders output").forEach((o, k) => (o.value = tau[k].toFixed(2)));
  const dim = matrixDim();
  const s = gateSummary(tau);
  $("fidelity").value = s[dim * dim].toFixed(4);
  const cells = $("matrix").querySelectorAll("td");
  for (let i = 0; i < dim * dim; i++) {
    const v = s[i];
    cells[i].textContent = v.toFixed(3);
    cells[i].style.background = `rgba(31, 95, 168, ${v.toFixed(3)})`;
    cells[i].style.color = v > 0.5 ? "#fff" : "#222";
  }
  const n = 41;
  const xs = Array.from({ length: n }, (_, i) => i / (n - 1));
  plot($("curve"), xs, Array.from(fidelityCurve(tau, n)), 1.0);
}

function setTau(values) {
  document.querySelectorAll("#sliders input").forEach((s, k) => (s.value = values[k]));
  updateGate();
}

function build() {
  const sliders = $("sliders");
  for (let k = 0; k < tauCount(); k++) {
    const p = document.createElement("p");
    p.innerHTML = `<label>τ${k + 1}</label><input type="range" min="-1.5" max="1.5" step="0.01" value="${REFERENCE[k]}"> <output></output>`;
    p.querySelector("input").addEventListener("input", updateGate);
    sliders.append(p);
  }
  const table = $("matrix");
  const cols = ["00", "01", "10", "11", "++", "+-", "-+", "--"];
  table.innerHTML =
    "<tr><th></th>" + cols.map((c) => `<th>${c}</th>`).join("") + "</tr>" +
    ROWS.map((r) => `<tr><th>|${r}⟩</th>` + "<td></td>".repeat(cols.length) + "</tr>").join("");
  $("delay").addEventListener("input", updateHom);
  $("reference").addEventListener("click", () => setTau(REFERENCE));
  $("zero").addEventListener("click", () => setTau(REFERENCE.map(() => 0)));
}

init()
  .then(() => {
    build();
    updateHom();
    updateGate();
  })
  .catch((e) => ($("error").textContent = `failed to load: ${e}`));
