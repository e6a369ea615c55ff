// Browser entry point: review queue on the left, catalog and model on
// the right, kept fresh by revision polling.

import { ApiClient } from "./api.js";
import { buildCard, Card, CardAction } from "./decisions.js";
import { layoutModel, renderSvg } from "./graph.js";
import { RevisionPoller } from "./poll.js";
import type {
  Catalog,
  IrmModel,
  PendingRequest,
  Report,
  SessionSummary,
} from "./types.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing container #${id}`);
  }
  return node;
}

class App {
  private client: ApiClient;
  private poller: RevisionPoller;
  private revision = 0;

  constructor(session: string) {
    this.client = new ApiClient("", session);
    this.poller = new RevisionPoller(
      () => this.client.revision(),
      () => void this.refresh(),
    );
  }

  async start(): Promise<void> {
    await this.refresh();
    this.poller.start(this.revision);
  }

  async refresh(): Promise<void> {
    const [state, decisions, model, report] = await Promise.all([
      this.client.state(),
      this.client.decisions(),
      this.client.modelIfReady(),
      this.client.reportIfReady(),
    ]);
    this.revision = decisions.revision;
    this.poller.seen(this.revision);
    this.renderStages(state.summary);
    this.renderQueue(decisions.pending, decisions.decided.length);
    this.renderCatalog(state.catalog);
    this.renderModel(model, report);
  }

  private banner(text: string): void {
    const box = el("banner");
    box.textContent = text;
    box.classList.toggle("hidden", text === "");
  }

  private renderStages(summary: SessionSummary): void {
    const row = el("stages");
    row.replaceChildren();
    for (const [name, stage] of Object.entries(summary.stages)) {
      const chip = document.createElement("span");
      chip.className = `stage stage-${stage.status}`;
      chip.textContent = stage.pending
        ? `${name} (${stage.pending})`
        : name;
      chip.title = stage.detail ?? stage.status;
      row.appendChild(chip);
    }
    el("revision").textContent =
      `journal revision ${summary.journal.revision}`;
  }

  private renderQueue(pending: PendingRequest[], decided: number): void {
    const queue = el("queue");
    queue.replaceChildren();
    el("queue-title").textContent = pending.length
      ? `Pending decisions (${pending.length})`
      : `Queue empty, ${decided} decided`;
    for (const request of pending) {
      queue.appendChild(this.cardElement(buildCard(request)));
    }
  }

  private cardElement(card: Card): HTMLElement {
    const box = document.createElement("article");
    box.className = `card card-${card.kind}`;
    const title = document.createElement("h3");
    title.textContent = card.title;
    box.appendChild(title);
    if (card.evidence) {
      const ev = document.createElement("p");
      ev.className = "evidence";
      ev.textContent = card.evidence;
      box.appendChild(ev);
    }
    for (const ctx of card.contexts) {
      const quote = document.createElement("blockquote");
      const tag = document.createElement("span");
      tag.className = "sentence-id";
      tag.textContent = ctx.sentenceId;
      quote.appendChild(tag);
      for (const seg of ctx.segments) {
        const holder = seg.marked
          ? document.createElement("mark")
          : document.createTextNode(seg.text);
        if (holder instanceof HTMLElement) {
          holder.textContent = seg.text;
        }
        quote.appendChild(holder);
      }
      box.appendChild(quote);
    }
    const actions = document.createElement("div");
    actions.className = "actions";
    for (const action of card.actions) {
      const button = document.createElement("button");
      button.textContent = action.label;
      button.addEventListener("click", () => {
        void this.submit(card, action);
      });
      actions.appendChild(button);
    }
    box.appendChild(actions);
    return box;
  }

  private async submit(card: Card, action: CardAction): Promise<void> {
    const result = await this.client.submit(
      card.id,
      action.choice,
      this.revision,
    );
    if (result.ok) {
      this.banner("");
      this.poller.seen(result.body.revision);
      await this.refresh();
      return;
    }
    if (result.status === 409) {
      this.banner(
        "Somebody decided first; the queue was reloaded. Try again.",
      );
    } else {
      this.banner(`${result.body.error}: could not record the choice.`);
    }
    await this.refresh();
  }

  private renderCatalog(catalog: Catalog | null): void {
    const box = el("catalog");
    box.replaceChildren();
    if (!catalog) {
      box.textContent = "Catalog not extracted yet.";
      return;
    }
    for (const comp of catalog.components) {
      const item = document.createElement("div");
      item.className = "component";
      const name = document.createElement("strong");
      name.textContent = comp.name;
      item.appendChild(name);
      const attrs = document.createElement("span");
      attrs.textContent =
        " knows " + comp.attributes.map((a) => a.ident).join(", ");
      item.appendChild(attrs);
      box.appendChild(item);
    }
  }

  private renderModel(model: IrmModel | null, report: Report | null): void {
    const status = el("model-status");
    const pane = el("model");
    if (!model) {
      status.textContent = "Model not assembled yet.";
      pane.replaceChildren();
      return;
    }
    const layout = layoutModel(model);
    const alternatives = layout.orAlternatives.reduce((a, b) => a + b, 0);
    let line = `Model ready: ${model.invariants.length} invariants`;
    if (alternatives) {
      line += `, ${alternatives} OR alternatives`;
    }
    if (report) {
      line += ` | ${report.verdict}, ${report.configuration_count} configurations`;
      if (report.errors || report.warnings) {
        line += ` (${report.errors} errors, ${report.warnings} warnings)`;
      }
    }
    status.textContent = line;
    pane.innerHTML = renderSvg(layout);
  }
}

const params = new URLSearchParams(window.location.search);
void new App(params.get("session") ?? "default").start();
