// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { mountApp } from "../src/app.js";
import { FakeClient, makeTask, settle } from "./fake_client.js";

function mount(client: FakeClient) {
  const root = document.createElement("div");
  document.body.append(root);
  const session = mountApp(root, client, "w");
  return { root, session };
}

function text(root: HTMLElement, selector: string): string[] {
  return Array.from(root.querySelectorAll(selector)).map(
    (el) => el.textContent ?? "",
  );
}

function submitButton(root: HTMLElement): HTMLButtonElement {
  const button = root.querySelector<HTMLButtonElement>(".submit-vote");
  if (!button) throw new Error("no submit button rendered");
  return button;
}

describe("worker page", () => {
  it("renders both statements verbatim, markup and all", async () => {
    const task = makeTask(0, {
      statement_1: 'You waive <b>all</b> rights & "remedies".',
      statement_2: "Fees are non-refundable.   Extra   spaces survive.",
    });
    const { root } = mount(new FakeClient([task]));
    await settle();

    expect(text(root, ".statement-text")).toEqual([
      task.statement_1,
      task.statement_2,
    ]);
    // textContent rendering: the markup-looking text is not parsed
    expect(root.querySelector(".statement-text b")).toBeNull();
  });

  it("keeps the three options in one fixed order", async () => {
    const { root } = mount(new FakeClient([makeTask(0)]));
    await settle();
    const values = Array.from(
      root.querySelectorAll<HTMLInputElement>("input[name=choice]"),
    ).map((radio) => radio.value);
    expect(values).toEqual(["first", "equal", "second"]);
  });

  it("disables submit until a selection exists", async () => {
    const client = new FakeClient([makeTask(0)]);
    const { root } = mount(client);
    await settle();

    expect(submitButton(root).disabled).toBe(true);
    submitButton(root).click();
    await settle();
    expect(client.votes).toHaveLength(0);

    const equal = root.querySelector<HTMLInputElement>("input[value=equal]");
    equal!.click();
    await settle();
    expect(submitButton(root).disabled).toBe(false);
  });

  it("maps keys 1/2/3 to the numbered options", async () => {
    const client = new FakeClient([makeTask(0)]);
    const { root } = mount(client);
    await settle();

    document.dispatchEvent(new KeyboardEvent("keydown", { key: "3" }));
    await settle();
    const checked = root.querySelector<HTMLInputElement>(
      "input[name=choice]:checked",
    );
    expect(checked?.value).toBe("second");

    submitButton(root).click();
    await settle();
    expect(client.votes.map((v) => v.choice)).toEqual(["second"]);
  });

  it("records one vote for a rapid double-click", async () => {
    const client = new FakeClient([makeTask(0)]);
    const { root } = mount(client);
    await settle();

    document.dispatchEvent(new KeyboardEvent("keydown", { key: "1" }));
    await settle();
    const button = submitButton(root);
    button.click();
    button.click(); // second click lands before the first submit resolves
    await settle();

    expect(client.votes).toHaveLength(1);
  });

  it("shows the done screen with the tally when tasks run out", async () => {
    const client = new FakeClient([makeTask(0)]);
    const { root } = mount(client);
    await settle();

    document.dispatchEvent(new KeyboardEvent("keydown", { key: "2" }));
    await settle();
    submitButton(root).click();
    await settle();

    expect(root.querySelector(".done")).not.toBeNull();
    expect(text(root, ".done-tally")[0]).toContain("completed 1");
  });
});
