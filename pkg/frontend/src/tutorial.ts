// First-load tutorial overlay; dismissible, remembered in localStorage.

const STORAGE_KEY = "causalwhatif.tutorial.seen";

export function tutorialHtml(): string {
  return [
    `<div class="tutorial-overlay" id="tutorial">`,
    `<div class="tutorial-card">`,
    `<h2>Reading the model</h2>`,
    `<ul>`,
    `<li>Each variable is a dial with a <b>green</b> knob (your profile) and, in`,
    ` comparison mode, an <b>orange</b> one.</li>`,
    `<li>Setting an internal variable pins it: its incoming edges blur and it stops`,
    ` listening to its parents. Click the × to hand it back to the model.</li>`,
    `<li>Edge thickness is effect size; red edges push the outcome down.</li>`,
    `<li>The map shows real cases with similar outcomes; click one to compare.</li>`,
    `<li>Save states in the tracker and click any point to jump back.</li>`,
    `<li>The meter says how common your configuration is in the data.</li>`,
    `</ul>`,
    `<button id="tutorial-dismiss">Got it</button>`,
    `</div></div>`,
  ].join("");
}

export function shouldShowTutorial(storage: Pick<Storage, "getItem"> = localStorage): boolean {
  try {
    return storage.getItem(STORAGE_KEY) == null;
  } catch {
    return true;
  }
}

export function markTutorialSeen(storage: Pick<Storage, "setItem"> = localStorage): void {
  try {
    storage.setItem(STORAGE_KEY, "1");
  } catch {
    // private-mode storage failures are non-fatal
  }
}
