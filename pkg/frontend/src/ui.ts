/**
 * DOM wiring for index.html. Pure glue: all behaviour worth testing lives
 * in api.ts, scheduler.ts, and store.ts.
 */

import { ApiClient, ApiError, type SessionInfo } from "./api.js";
import { RecomposeScheduler } from "./scheduler.js";
import {
  EPSILON_MAX,
  EPSILON_MIN,
  RADIUS_MAX,
  RADIUS_MIN,
  TuningStore,
  type ViewMode,
  WEIGHT_MAX,
  WEIGHT_MIN,
  WEIGHT_PRESETS,
  epsilonFromSlider,
  sliderFromEpsilon,
} from "./store.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function pngObjectUrl(bytes: Uint8Array): string {
  const buf = bytes.buffer.slice(bytes.byteOffset, bytes.byteOffset + bytes.byteLength) as ArrayBuffer;
  return URL.createObjectURL(new Blob([buf], { type: "image/png" }));
}

export function mount(): void {
  const client = new ApiClient("");
  const store = new TuningStore();

  const fileInput = el<HTMLInputElement>("file-input");
  const statusLine = el<HTMLElement>("status");
  const decomposeBtn = el<HTMLButtonElement>("decompose-btn");
  const colorModeSel = el<HTMLSelectElement>("color-mode");
  const addLevelBtn = el<HTMLButtonElement>("add-level");
  const removeLevelBtn = el<HTMLButtonElement>("remove-level");
  const scheduleBox = el<HTMLElement>("schedule-controls");
  const weightsBox = el<HTMLElement>("weight-controls");
  const presetBox = el<HTMLElement>("presets");
  const preview = el<HTMLImageElement>("preview");
  const original = el<HTMLImageElement>("original");
  const viewModeSel = el<HTMLSelectElement>("view-mode");
  const layerStrip = el<HTMLElement>("layers");

  let session: SessionInfo | null = null;
  let decomposed = false;
  let previewUrl: string | null = null;
  let originalUrl: string | null = null;

  const setStatus = (text: string, isError = false): void => {
    statusLine.textContent = text;
    statusLine.classList.toggle("error", isError);
  };

  const describe = (error: unknown): string =>
    error instanceof ApiError
      ? `${error.message} (${error.code})`
      : error instanceof Error
        ? error.message
        : String(error);

  const applyView = (): void => {
    const { viewMode } = store.getState();
    original.hidden = viewMode !== "side-by-side";
    if (originalUrl) original.src = originalUrl;
    if (viewMode === "base" && session && decomposed) {
      preview.src = client.layerUrl(session.sessionId, "base");
    } else if (typeof viewMode === "number" && session && decomposed) {
      preview.src = client.layerUrl(session.sessionId, viewMode);
    } else if (previewUrl) {
      preview.src = previewUrl;
    } else if (originalUrl) {
      preview.src = originalUrl;
    }
  };

  const scheduler = new RecomposeScheduler(
    async (payload) => {
      if (!session) throw new Error("no session");
      return client.recompose(session.sessionId, payload.weights, payload.baseWeight);
    },
    (png) => {
      if (previewUrl) URL.revokeObjectURL(previewUrl);
      previewUrl = pngObjectUrl(png);
      applyView();
      setStatus("preview updated");
    },
    (error) => setStatus(`recompose failed: ${describe(error)}`, true),
  );

  const requestPreview = (): void => {
    if (!session || !decomposed) return;
    const { weights, baseWeight } = store.getState();
    scheduler.request({ weights, baseWeight });
  };

  const renderSchedule = (): void => {
    const { schedule } = store.getState();
    scheduleBox.replaceChildren();
    schedule.forEach((level, i) => {
      const row = document.createElement("div");
      row.className = "control-row";

      const radius = document.createElement("input");
      radius.type = "range";
      radius.min = String(RADIUS_MIN);
      radius.max = String(RADIUS_MAX);
      radius.step = "1";
      radius.value = String(level.radius);
      radius.addEventListener("input", () => store.setRadius(i, Number(radius.value)));

      const epsilon = document.createElement("input");
      epsilon.type = "range";
      epsilon.min = "0";
      epsilon.max = "1";
      epsilon.step = "0.001";
      epsilon.value = String(sliderFromEpsilon(level.epsilon));
      epsilon.addEventListener("input", () =>
        store.setEpsilon(i, epsilonFromSlider(Number(epsilon.value))),
      );

      const label = document.createElement("span");
      label.textContent = `level ${i + 1}: r=${level.radius} eps=${level.epsilon.toExponential(2)}`;

      row.append(label, radius, epsilon);
      scheduleBox.append(row);
    });
    removeLevelBtn.disabled = schedule.length <= 1;
  };

  const renderWeights = (): void => {
    const { weights, baseWeight } = store.getState();
    weightsBox.replaceChildren();

    const makeSlider = (label: string, value: number, apply: (v: number) => void): void => {
      const row = document.createElement("div");
      row.className = "control-row";
      const caption = document.createElement("span");
      caption.textContent = `${label}: ${value.toFixed(2)}`;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = String(WEIGHT_MIN);
      slider.max = String(WEIGHT_MAX);
      slider.step = "0.05";
      slider.value = String(value);
      slider.addEventListener("input", () => apply(Number(slider.value)));
      row.append(caption, slider);
      weightsBox.append(row);
    };

    makeSlider("base", baseWeight, (v) => store.setBaseWeight(v));
    weights.forEach((w, i) => makeSlider(`detail ${i + 1}`, w, (v) => store.setWeight(i, v)));
  };

  const setWeightsEnabled = (enabled: boolean): void => {
    for (const input of weightsBox.querySelectorAll("input")) {
      input.disabled = !enabled;
    }
    for (const btn of presetBox.querySelectorAll("button")) {
      btn.disabled = !enabled;
    }
  };

  const renderViewModes = (): void => {
    const modes: Array<[string, ViewMode]> = [
      ["result", "result"],
      ["side-by-side original", "side-by-side"],
    ];
    if (decomposed) {
      modes.push(["base layer", "base"]);
      for (let i = 1; i <= store.levels; i++) modes.push([`detail layer ${i}`, i]);
    }
    viewModeSel.replaceChildren();
    for (const [label, value] of modes) {
      const opt = document.createElement("option");
      opt.textContent = label;
      opt.value = String(value);
      viewModeSel.append(opt);
    }
    viewModeSel.value = String(store.getState().viewMode);
  };

  const renderLayers = async (): Promise<void> => {
    if (!session || !decomposed) {
      layerStrip.replaceChildren();
      return;
    }
    const names: Array<"base" | number> = ["base"];
    for (let i = 1; i <= store.levels; i++) names.push(i);
    layerStrip.replaceChildren();
    for (const layer of names) {
      const img = document.createElement("img");
      img.className = "thumb";
      img.title = layer === "base" ? "base" : `detail ${layer}`;
      img.src = client.layerUrl(session.sessionId, layer);
      layerStrip.append(img);
    }
  };

  for (const name of Object.keys(WEIGHT_PRESETS)) {
    const btn = document.createElement("button");
    btn.textContent = name;
    btn.addEventListener("click", () => {
      store.applyPreset(name);
      requestPreview();
    });
    presetBox.append(btn);
  }

  store.subscribe(() => {
    renderSchedule();
    renderWeights();
  });

  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    try {
      if (session) await client.deleteSession(session.sessionId).catch(() => {});
      decomposed = false;
      scheduler.cancel();
      session = await client.createSession(file, file.name);
      if (originalUrl) URL.revokeObjectURL(originalUrl);
      originalUrl = URL.createObjectURL(file);
      if (previewUrl) URL.revokeObjectURL(previewUrl);
      previewUrl = null;
      renderViewModes();
      applyView();
      setStatus(`loaded ${session.width}x${session.height}, ${session.channels} channel(s)`);
    } catch (error) {
      session = null;
      setStatus(`upload failed: ${describe(error)}`, true);
    }
  });

  decomposeBtn.addEventListener("click", async () => {
    if (!session) {
      setStatus("upload an image first", true);
      return;
    }
    const { schedule, colorMode } = store.getState();
    decomposeBtn.disabled = true;
    setWeightsEnabled(false);
    try {
      setStatus("decomposing...");
      const result = await client.decompose(session.sessionId, {
        radii: schedule.map((lv) => lv.radius),
        epsilons: schedule.map((lv) => lv.epsilon),
        colorMode,
      });
      decomposed = true;
      setStatus(`decomposed ${result.levels} level(s) in ${result.timingMs.toFixed(0)} ms`);
      renderViewModes();
      await renderLayers();
      requestPreview();
    } catch (error) {
      setStatus(`decompose failed: ${describe(error)}`, true);
    } finally {
      decomposeBtn.disabled = false;
      setWeightsEnabled(true);
    }
  });

  colorModeSel.addEventListener("change", () => {
    store.setColorMode(colorModeSel.value === "luma" ? "luma" : "per-channel");
  });
  addLevelBtn.addEventListener("click", () => store.addLevel());
  removeLevelBtn.addEventListener("click", () => store.removeLevel());
  viewModeSel.addEventListener("change", () => {
    const raw = viewModeSel.value;
    const asNumber = Number(raw);
    store.setViewMode(Number.isInteger(asNumber) && asNumber >= 1 ? asNumber : (raw as ViewMode));
    applyView();
  });

  weightsBox.addEventListener("input", () => requestPreview());

  renderSchedule();
  renderWeights();
  renderViewModes();
  setStatus(`epsilon range ${EPSILON_MIN} to ${EPSILON_MAX}; weights ${WEIGHT_MIN} to ${WEIGHT_MAX}`);
}

if (typeof document !== "undefined" && document.getElementById("file-input")) {
  mount();
}
