/** Application controller: form editing, debounced re-runs, scenario
 * comparison.  One in-flight design request per scenario lane; stale
 * responses are discarded by the API client's sequence numbers. */

import { ApiClient, EngineError, ValidationError } from "./api.js";
import { canSubmit, defaultFormState, toRunConfig, validate } from "./form.js";
import type { FormState } from "./form.js";
import { renderComparison, renderReport } from "./view.js";
import type { DesignReport } from "./types.js";

export const DEBOUNCE_MS = 400;

export class App {
  state: FormState = defaultFormState();
  client: ApiClient;
  scenarios = new Map<string, DesignReport>();
  current: DesignReport | null = null;
  logScale = false;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private root: HTMLElement;

  constructor(root: HTMLElement, client: ApiClient) {
    this.root = root;
    this.client = client;
  }

  /** Apply a form edit and schedule a re-run after the debounce windows. */
  edit(patch: Partial<FormState>): void {
    Object.assign(this.state, patch);
    this.renderFormStatus();
    if (this.timer !== null) clearTimeout(this.timer);
    if (!canSubmit(this.state)) return;
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.submit();
    }, DEBOUNCE_MS);
  }

  async submit(): Promise<DesignReport | null> {
    if (!canSubmit(this.state)) return null;
    this.setStatus("running…");
    try {
      const report = await this.client.postDesign(toRunConfig(this.state));
      if (report === null) return null; // superseded by a newer edit
      this.current = report;
      this.renderCurrent();
      return report;
    } catch (err) {
      this.renderError(err);
      return null;
    }
  }

  saveScenario(): void {
    if (this.current) {
      this.scenarios.set(this.current.config_hash, this.current);
      this.renderComparisonPane();
    }
  }

  toggleLogScale(): void {
    this.logScale = !this.logScale;
    this.renderCurrent();
  }

  private pane(name: string): HTMLElement {
    let node = this.root.querySelector<HTMLElement>(`[data-pane="${name}"]`);
    if (!node) {
      node = document.createElement("div");
      node.setAttribute("data-pane", name);
      this.root.appendChild(node);
    }
    return node;
  }

  private setStatus(text: string): void {
    this.pane("status").textContent = text;
  }

  renderFormStatus(): void {
    const errors = validate(this.state);
    const pane = this.pane("form-errors");
    pane.replaceChildren();
    for (const e of errors) {
      const li = document.createElement("div");
      li.className = "field-error";
      li.setAttribute("data-field", e.field);
      li.textContent = `${e.field}: ${e.message}`;
      pane.appendChild(li);
    }
    const submit = this.root.querySelector<HTMLButtonElement>("button[data-submit]");
    if (submit) submit.disabled = errors.length > 0;
  }

  renderCurrent(): void {
    if (!this.current) return;
    this.setStatus("");
    const pane = this.pane("report");
    pane.replaceChildren(renderReport(this.current, { logScale: this.logScale }));
  }

  renderComparisonPane(): void {
    const pane = this.pane("comparison");
    pane.replaceChildren(
      renderComparison([...this.scenarios.values()], { logScale: this.logScale }),
    );
  }

  private renderError(err: unknown): void {
    const pane = this.pane("report");
    pane.replaceChildren();
    const box = document.createElement("div");
    box.className = "engine-error";
    if (err instanceof EngineError) {
      box.setAttribute("data-code", err.body.error_code);
      box.textContent = `${err.body.error_code}: ${err.body.message}`;
    } else if (err instanceof ValidationError) {
      box.setAttribute("data-code", "validation");
      box.textContent = err.errors
        .map((e) => (e.field ? `${e.field}: ${e.message}` : e.message))
        .join("\n");
    } else {
      box.setAttribute("data-code", "network");
      box.textContent = String(err);
    }
    pane.appendChild(box);
    this.setStatus("");
  }
}
