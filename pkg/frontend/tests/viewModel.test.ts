import { describe, expect, it } from "vitest";

import type { GraphStats, ScanResponse, SessionView, VulnEntry } from "../src/api.js";
import {
  renderGraphSummary,
  renderSessionPanel,
  renderVulnCard,
} from "../src/render.js";
import {
  buildSessionPanel,
  buildViewModel,
  markStale,
} from "../src/viewModel.js";
import { fixture } from "./fakeFetch.js";

const stats = fixture<GraphStats>("graph_stats");
const vulns = fixture<VulnEntry[]>("vulns");
const scan = fixture<ScanResponse>("scan");
const suggesting = fixture<SessionView>("session_prefs");

describe("view model from recorded responses", () => {
  it("derives every rendered number from the service", () => {
    const model = buildViewModel(stats, vulns, scan);
    expect(model.graph.nodes).toBe(702);
    expect(model.graph.edges).toBe(348);
    expect(model.graph.containers).toEqual(["listing1"]);
    const byId = Object.fromEntries(model.vulnCards.map((c) => [c.id, c]));
    expect(byId["cgroup-escape"].exploitable).toBe(true);
    expect(byId["CVE-2020-13401"].exploitable).toBe(false);
    expect(byId["CVE-2022-0492"].cvss).toBe(7.8);
  });

  it("renders the summary and cards deterministically", () => {
    const model = buildViewModel(stats, vulns, scan);
    const summary = renderGraphSummary(model.graph);
    expect(summary).toContain("graph: 702 nodes, 348 edges");
    expect(summary).toContain("Syscall: 364");
    const card = renderVulnCard(
      model.vulnCards.find((c) => c.id === "cgroup-escape")!);
    expect(card).toContain("cgroup-escape [EXPLOITABLE]");
    expect(card).toContain("witness:");
  });

  it("stale views are flagged, never silently shown", () => {
    const model = markStale(buildViewModel(stats, vulns, scan));
    expect(model.stale).toBe(true);
    expect(renderGraphSummary(model.graph, model.stale)).toContain("(stale)");
  });

  it("session panel surfaces suggestion, score and journal tail", () => {
    const panel = buildSessionPanel(suggesting);
    const text = renderSessionPanel(panel);
    expect(text).toContain("session " + suggesting.id);
    expect(text).toContain("[Suggesting]");
    expect(text).toContain("drop capability SYS_ADMIN");
    expect(text).toContain("resilience score: 0");
    expect(panel.journalTail).toContain("suggested");
  });
});
