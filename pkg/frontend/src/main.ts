/** Browser bootstrap: builds the editor form and wires it to the app. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import type { FormState } from "./form.js";
import type { ComponentPrior } from "./types.js";

const UNINFORMATIVE: ComponentPrior[] = [
  { dist: "gamma", shape: 2, rate: 0.1 },
  { dist: "gamma", shape: 2, rate: 0.1 },
];
const INFORMATIVE_G1: ComponentPrior[] = [
  { dist: "gamma", shape: 33.79, rate: 15.66 },
  { dist: "gamma", shape: 26.96, rate: 37.92 },
];
const INFORMATIVE_G2: ComponentPrior[] = [
  { dist: "gamma", shape: 105.53, rate: 42.97 },
  { dist: "gamma", shape: 85.43, rate: 106.31 },
];

function numberInput(
  label: string,
  value: number,
  onInput: (v: number) => void,
  step = "any",
): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  wrap.textContent = label;
  const input = document.createElement("input");
  input.type = "number";
  input.step = step;
  input.value = String(value);
  input.addEventListener("input", () => onInput(Number(input.value)));
  wrap.appendChild(input);
  return wrap;
}

export function mount(root: HTMLElement, apiBase = ""): App {
  const client = new ApiClient(apiBase);
  const app = new App(root, client);

  const form = document.createElement("form");
  form.className = "design-form";
  form.addEventListener("submit", (e) => e.preventDefault());

  const edit = (patch: Partial<FormState>) => app.edit(patch);

  form.appendChild(
    numberInput("conviction threshold", app.state.gamma, (v) => edit({ gamma: v })),
  );
  form.appendChild(
    numberInput("target power", app.state.targetPower, (v) => edit({ targetPower: v })),
  );
  form.appendChild(
    numberInput("equivalence margin", app.state.deltaStar ?? 0.3, (v) =>
      edit({ deltaStar: v }),
    ),
  );
  form.appendChild(
    numberInput("threshold", app.state.threshold ?? 0, (v) => edit({ threshold: v })),
  );
  form.appendChild(numberInput("allocation ratio q", app.state.q, (v) => edit({ q: v })));
  form.appendChild(numberInput("seed", app.state.seed, (v) => edit({ seed: v }), "1"));

  const groupInputs = (label: string, key: "eta1" | "eta2") => {
    app.state[key].forEach((value, i) => {
      form.appendChild(
        numberInput(`${label}[${i}]`, value, (v) => {
          const next = [...app.state[key]];
          next[i] = v;
          edit({ [key]: next } as Partial<FormState>);
        }),
      );
    });
  };
  groupInputs("group-1 parameters", "eta1");
  groupInputs("group-2 parameters", "eta2");

  const priorToggle = document.createElement("label");
  priorToggle.className = "field";
  priorToggle.textContent = "informative priors";
  const priorBox = document.createElement("input");
  priorBox.type = "checkbox";
  priorBox.setAttribute("data-informative", "");
  priorBox.addEventListener("change", () => {
    edit(
      priorBox.checked
        ? { priorsGroup1: INFORMATIVE_G1, priorsGroup2: INFORMATIVE_G2 }
        : { priorsGroup1: UNINFORMATIVE, priorsGroup2: UNINFORMATIVE },
    );
  });
  priorToggle.appendChild(priorBox);
  form.appendChild(priorToggle);

  const noninfToggle = document.createElement("label");
  noninfToggle.className = "field";
  noninfToggle.textContent = "noninferiority (one-sided)";
  const noninfBox = document.createElement("input");
  noninfBox.type = "checkbox";
  noninfBox.addEventListener("change", () => edit({ noninferiority: noninfBox.checked }));
  noninfToggle.appendChild(noninfBox);
  form.appendChild(noninfToggle);

  const submit = document.createElement("button");
  submit.setAttribute("data-submit", "");
  submit.textContent = "run design";
  submit.addEventListener("click", () => void app.submit());
  form.appendChild(submit);

  const save = document.createElement("button");
  save.setAttribute("data-save", "");
  save.textContent = "save scenario";
  save.addEventListener("click", () => app.saveScenario());
  form.appendChild(save);

  const logToggle = document.createElement("button");
  logToggle.setAttribute("data-log-scale", "");
  logToggle.textContent = "toggle log n axis";
  logToggle.addEventListener("click", () => app.toggleLogScale());
  form.appendChild(logToggle);

  root.appendChild(form);
  app.renderFormStatus();
  return app;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app")!);
}
