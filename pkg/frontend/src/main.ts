/** Page bootstrap: worker token and API base come from the URL. */

import { HttpTaskClient } from "./api.js";
import { mountApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const workerId =
  params.get("worker") ?? `w-${Math.random().toString(36).slice(2, 10)}`;
const apiBase = params.get("api") ?? "";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app element");
}
mountApp(root, new HttpTaskClient(apiBase), workerId);
