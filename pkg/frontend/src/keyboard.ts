/** Virtual keyboard + confirm views, mirroring the handheld entry screen. */

import type { FlowController, FlowState } from "./flow.js";

const ROWS = ["qwertyuiop", "asdfghjkl", "zxcvbnm"];

export function mountEntryPanel(root: HTMLElement, flow: FlowController): (s: FlowState) => void {
  root.innerHTML = `
    <div id="keyboard-view">
      <div class="draft-line"><span id="draft"></span><span class="caret">|</span></div>
      <div id="keys"></div>
      <div class="entry-error" id="entry-error"></div>
    </div>
    <div id="confirm-view" hidden>
      <div class="confirm-idea" id="confirm-idea"></div>
      <div class="confirm-buttons">
        <button id="reenter">&#8592; re-enter</button>
        <button id="putdown" class="primary">put tile down</button>
      </div>
    </div>
    <div id="tracking-view" hidden>
      <p>watch your tile find its aggregate&hellip;</p>
      <div class="confirm-idea" id="tracking-idea"></div>
    </div>
  `;

  const keys = root.querySelector<HTMLDivElement>("#keys")!;
  for (const row of ROWS) {
    const div = document.createElement("div");
    div.className = "key-row";
    for (const ch of row) {
      div.appendChild(key(ch, () => flow.type(ch)));
    }
    keys.appendChild(div);
  }
  const bottom = document.createElement("div");
  bottom.className = "key-row";
  bottom.appendChild(key("space", () => flow.type(" "), "wide"));
  bottom.appendChild(key("⌫", () => flow.backspace()));
  bottom.appendChild(key("enter", () => flow.pressEnter(), "wide primary"));
  keys.appendChild(bottom);

  root.querySelector<HTMLButtonElement>("#reenter")!.onclick = () => flow.reenter();
  root.querySelector<HTMLButtonElement>("#putdown")!.onclick = () => void flow.putDown();

  const render = (state: FlowState) => {
    root.querySelector<HTMLElement>("#keyboard-view")!.hidden = state.view !== "keyboard";
    root.querySelector<HTMLElement>("#confirm-view")!.hidden = state.view !== "confirm";
    root.querySelector<HTMLElement>("#tracking-view")!.hidden = state.view !== "tracking";
    root.querySelector<HTMLElement>("#draft")!.textContent = state.draft;
    root.querySelector<HTMLElement>("#confirm-idea")!.textContent = state.draft;
    root.querySelector<HTMLElement>("#tracking-idea")!.textContent = state.draft;
    root.querySelector<HTMLElement>("#entry-error")!.textContent = state.error ?? "";
  };
  render(flow.state);
  return render;
}

function key(label: string, onClick: () => void, extra = ""): HTMLButtonElement {
  const button = document.createElement("button");
  button.className = `key ${extra}`.trim();
  button.textContent = label;
  button.onclick = onClick;
  return button;
}
