import { ApiClient } from "./api.js";
import { mountApp } from "./app.js";

const base = new URLSearchParams(window.location.search).get("api") ?? "";
mountApp(document.getElementById("app")!, new ApiClient(base));
