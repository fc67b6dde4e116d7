/** Single-page annotation app: queue -> label -> submit -> retrain -> chart. */

import { ApiClient, ApiError, Status } from "./api.js";
import { BatchStore } from "./store.js";
import { chartGeometry } from "./chart.js";

const api = new ApiClient();
const BATCH_SIZE = 50;

let store: BatchStore | null = null;
let labelsSinceRetrain = 0;
let submitting = false;

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
};

function setBanner(message: string, kind: "info" | "error" | "" = ""): void {
  const banner = el("banner");
  banner.textContent = message;
  banner.className = kind;
  banner.hidden = message === "";
}

function renderStatus(status: Status): void {
  el("status-line").textContent =
    `round ${status.round} — ${status.labeled_count} labeled / ` +
    `${status.unlabeled_count} in pool`;
  el("stop-banner").hidden = !status.should_stop;
  renderChart(status);
}

function renderChart(status: Status): void {
  const svg = el("chart") as unknown as SVGSVGElement;
  const width = 420;
  const height = 140;
  const geometry = chartGeometry(
    status.history.map((h) => ({ round: h.round, devF1: h.dev_f1 })),
    width,
    height,
  );
  const circles = geometry.points
    .map(
      (p) =>
        `<circle cx="${p.x}" cy="${p.y}" r="3"><title>round ${p.round}: ` +
        `dev F1 ${p.devF1.toFixed(4)}</title></circle>`,
    )
    .join("");
  svg.innerHTML =
    (geometry.polyline ? `<polyline points="${geometry.polyline}" fill="none"></polyline>` : "") +
    circles;
  const last = status.history[status.history.length - 1];
  el("dev-f1").textContent = last ? `dev F1 ${last.dev_f1.toFixed(4)}` : "no rounds yet";
}

function renderCards(): void {
  const list = el("cards");
  list.innerHTML = "";
  if (!store || store.size === 0) {
    el("queue-empty").hidden = store === null;
    updateSubmit();
    return;
  }
  el("queue-empty").hidden = true;
  store.cards.forEach((card, index) => {
    const item = document.createElement("li");
    item.className =
      "card" +
      (index === store!.cursor ? " current" : "") +
      (card.chosenLabel !== null ? " labeled" : "");
    item.innerHTML = `
      <div class="meta">${card.arg_type} · p=${card.model_p.toFixed(3)} · ${escapeHtml(card.doc_excerpt)}</div>
      <div class="texts"><span>${escapeHtml(card.text_a)}</span><span>${escapeHtml(card.text_b)}</span></div>
      <div class="choices">
        <button data-label="1" class="${card.chosenLabel === 1 ? "chosen" : ""}">redundant (1)</button>
        <button data-label="0" class="${card.chosenLabel === 0 ? "chosen" : ""}">distinct (0)</button>
      </div>`;
    item.addEventListener("click", () => {
      store!.moveCursor(index);
      renderCards();
    });
    item.querySelectorAll("button").forEach((button) => {
      button.addEventListener("click", (event) => {
        event.stopPropagation();
        store!.setLabel(index, button.dataset.label === "1" ? 1 : 0);
        store!.moveCursor(index);
        store!.advance();
        renderCards();
      });
    });
    list.appendChild(item);
  });
  updateSubmit();
}

function updateSubmit(): void {
  const button = el("submit") as HTMLButtonElement;
  button.disabled = submitting || !store || !store.allLabeled;
  el("progress").textContent = store ? `${store.labeledCount}/${store.size} labeled` : "";
}

function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) => `&#${c.charCodeAt(0)};`);
}

async function loadQueue(): Promise<void> {
  setBanner("");
  try {
    const queue = await api.fetchQueue(BATCH_SIZE);
    store = queue.batch_id ? new BatchStore(queue.batch_id, queue.pairs) : null;
    if (!store) {
      el("queue-empty").textContent = "pool exhausted — every pair is labeled";
      el("queue-empty").hidden = false;
    }
    renderCards();
  } catch (error) {
    store = null;
    renderCards();
    showError(error, true);
  }
}

async function refreshStatus(): Promise<void> {
  try {
    renderStatus(await api.status());
  } catch (error) {
    showError(error, true);
  }
}

function showError(error: unknown, retryable: boolean): void {
  const message =
    error instanceof ApiError
      ? error.message
      : "service unreachable — check that the annotation server is running";
  setBanner(retryable ? `${message} (press retry)` : message, "error");
  (el("retry") as HTMLButtonElement).hidden = !retryable;
}

async function submit(): Promise<void> {
  if (!store || !store.allLabeled || submitting) return;
  submitting = true;
  updateSubmit();
  try {
    const ack = await api.submitLabels(store.batchId, store.toSubmission());
    if (ack.applied) labelsSinceRetrain += store.size;
    store = null;
    await refreshStatus();
    await loadQueue();
  } catch (error) {
    showError(error, true);
  } finally {
    submitting = false;
    updateSubmit();
  }
}

async function retrain(): Promise<void> {
  if (labelsSinceRetrain === 0) {
    const proceed = window.confirm("No new labels since the last retrain. Retrain anyway?");
    if (!proceed) return;
  }
  try {
    const report = await api.triggerRetrain();
    labelsSinceRetrain = 0;
    setBanner(`round ${report.round} trained — dev F1 ${report.dev_f1.toFixed(4)}`, "info");
    await refreshStatus();
    await loadQueue();
  } catch (error) {
    showError(error, false);
  }
}

function init(): void {
  el("submit").addEventListener("click", () => void submit());
  el("retrain").addEventListener("click", () => void retrain());
  el("retry").addEventListener("click", () => {
    void refreshStatus();
    void loadQueue();
  });
  document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement) return;
    if (store && store.handleKey(event.key)) {
      event.preventDefault();
      renderCards();
    }
  });
  void refreshStatus();
  void loadQueue();
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", init);
}
