/** DOM layer: renders the session state and forwards worker input.
 *
 * Statements are written with textContent, never innerHTML, so the
 * text shown is byte-for-byte the text the server sent. The three
 * options keep one fixed order (statement 1 / equal / statement 2) and
 * the two statement panels get identical styling; nothing on the page
 * nudges the worker toward either side.
 */

import type { Choice, TaskClient } from "./api.js";
import { Session, type SessionState } from "./session.js";

const OPTIONS: ReadonlyArray<{ choice: Choice; key: string; label: string }> = [
  { choice: "first", key: "1", label: "Statement 1 is more important" },
  { choice: "equal", key: "2", label: "They are equally important" },
  { choice: "second", key: "3", label: "Statement 2 is more important" },
];

function h<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const el = doc.createElement(tag);
  if (className) el.className = className;
  if (text !== undefined) el.textContent = text;
  return el;
}

function renderTask(
  root: HTMLElement,
  session: Session,
  state: Extract<SessionState, { kind: "task" }>,
): void {
  const doc = root.ownerDocument;

  const header = h(doc, "header");
  header.append(
    h(doc, "h1", undefined, "Which statement matters more?"),
    h(doc, "span", "tally", `completed: ${session.completed}`),
  );
  root.append(header);

  if (state.notice) {
    root.append(h(doc, "p", "notice", state.notice));
  }

  const panels = h(doc, "section", "statements");
  for (const [number, text] of [
    ["1", state.task.statement_1],
    ["2", state.task.statement_2],
  ] as const) {
    const panel = h(doc, "article", "statement");
    panel.append(h(doc, "span", "statement-number", number));
    const body = h(doc, "p", "statement-text");
    body.textContent = text; // verbatim; no markup interpretation
    panel.append(body);
    panels.append(panel);
  }
  root.append(panels);

  const options = h(doc, "fieldset", "options");
  for (const option of OPTIONS) {
    const label = h(doc, "label");
    const radio = h(doc, "input");
    radio.type = "radio";
    radio.name = "choice";
    radio.value = option.choice;
    radio.checked = state.selection === option.choice;
    radio.disabled = state.submitting;
    radio.addEventListener("change", () => session.select(option.choice));
    label.append(radio, doc.createTextNode(` ${option.key} - ${option.label}`));
    options.append(label);
  }
  root.append(options);

  const submit = h(doc, "button", "submit-vote", "Submit");
  submit.disabled = state.selection === null || state.submitting;
  submit.addEventListener("click", () => void session.submit());
  root.append(submit);
}

function render(root: HTMLElement, session: Session, state: SessionState): void {
  const doc = root.ownerDocument;
  root.replaceChildren();
  switch (state.kind) {
    case "loading":
      root.append(h(doc, "p", "loading", "Fetching a comparison..."));
      break;
    case "task":
      renderTask(root, session, state);
      break;
    case "done": {
      const done = h(doc, "section", "done");
      done.append(
        h(doc, "h1", undefined, "All done"),
        h(
          doc,
          "p",
          "done-tally",
          `No more comparisons are available. You completed ${state.completed}.`,
        ),
      );
      root.append(done);
      break;
    }
    case "failed":
      root.append(h(doc, "p", "failed", state.message));
      break;
  }
}

/** Wire a session to a root element; returns the session for callers. */
export function mountApp(
  root: HTMLElement,
  client: TaskClient,
  workerId: string,
): Session {
  const session = new Session(client, workerId);
  session.onChange((state) => render(root, session, state));
  render(root, session, session.current());

  root.ownerDocument.addEventListener("keydown", (event) => {
    const option = OPTIONS.find((o) => o.key === event.key);
    if (option) {
      session.select(option.choice);
    }
  });

  void session.start();
  return session;
}
