// Browser bootstrap: API base url and token come from the query string
// (?api=http://host:8000&token=...) with localStorage fallback.

import { VigilClient } from "./client.js";
import { Dashboard } from "./dashboard.js";

function setting(name: string, fallback: string): string {
  const params = new URLSearchParams(window.location.search);
  const fromQuery = params.get(name);
  if (fromQuery !== null) {
    localStorage.setItem(`vigil.${name}`, fromQuery);
    return fromQuery;
  }
  return localStorage.getItem(`vigil.${name}`) ?? fallback;
}

const client = new VigilClient({
  baseUrl: setting("api", "http://127.0.0.1:8000"),
  token: setting("token", "") || undefined,
});

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");
new Dashboard(client, root, setting("reviewer", "caregiver")).start();
