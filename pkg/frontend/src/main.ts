import { ReviewApi } from "./api";
import { ReviewUi } from "./ui";
import "./style.css";

// API base resolution: ?api=http://host:port wins and is remembered,
// otherwise the last remembered value, otherwise same origin (the dev
// server proxies /api, and the review service serves this bundle itself).
function resolveBaseUrl(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  if (param !== null) {
    localStorage.setItem("afforge.apiBase", param);
    return param;
  }
  return localStorage.getItem("afforge.apiBase") ?? "";
}

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app mount point");

const ui = new ReviewUi(root, new ReviewApi(resolveBaseUrl()));
ui.start().catch((err) => {
  root.textContent = `failed to start: ${err}`;
});
