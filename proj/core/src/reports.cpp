#include "commons/reports.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "commons/support/crypto.hpp"

namespace commons::reports {
namespace {

using nlohmann::json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Status write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return Error{Errc::InvalidPayload, path.string() + ": cannot open for writing"};
  out << body;
  out.flush();
  if (!out) return Error{Errc::InvalidPayload, path.string() + ": write failed"};
  return ok_status();
}

std::string mechanisms_line(const Scenario& s) {
  std::string on;
  for (int m = 1; m <= kMechanismCount; ++m) {
    if (!s.mech[m]) continue;
    if (!on.empty()) on += ',';
    on += mechanism_tag(m);
  }
  return on;
}

std::string summary_tsv(const Scenario& s, const SimRun& run, const Digest32& final_hash) {
  const auto& m = run.metrics;
  std::ostringstream t;
  t << "key\tvalue\n";
  t << "name\t" << s.name << '\n';
  t << "seed\t" << s.seed << '\n';
  t << "ticks\t" << m.ticks << '\n';
  t << "mechanisms_on\t" << mechanisms_line(s) << '\n';
  t << "packages_total\t" << m.packages_total << '\n';
  t << "packages_done\t" << m.packages_done << '\n';
  t << "completion\t" << fixed6(m.completion) << '\n';
  t << "depletion_tick\t" << (m.depletion_tick ? std::to_string(*m.depletion_tick) : "-") << '\n';
  t << "tragedy\t" << (m.tragedy ? "true" : "false") << '\n';
  t << "first_greed_reduction\t"
    << (m.first_greed_reduction ? std::to_string(*m.first_greed_reduction) : "-") << '\n';
  t << "events_accepted\t" << m.accepted << '\n';
  t << "events_rejected\t" << m.rejected << '\n';
  t << "genesis_state\t" << to_hex(run.log.genesis) << '\n';
  t << "final_state\t" << to_hex(final_hash) << '\n';
  return t.str();
}

std::string timeseries_tsv(const SimMetrics& m) {
  std::ostringstream t;
  t << "tick\treserve\tdone\tviolations\tsanctions\n";
  for (const auto& s : m.series)
    t << s.tick << '\t' << s.reserve << '\t' << s.done << '\t' << s.violations << '\t'
      << s.sanctions << '\n';
  return t.str();
}

std::string ppc_tsv(const SimMetrics& m) {
  std::ostringstream t;
  t << "period\tpromised\tcompleted\tratio\n";
  for (const auto& p : m.ppc) {
    t << p.period << '\t' << p.promised << '\t' << p.completed << '\t';
    if (p.promised > 0)
      t << fixed6(static_cast<double>(p.completed) / static_cast<double>(p.promised));
    else
      t << '-';
    t << '\n';
  }
  return t.str();
}

std::string kinds_tsv(const SimMetrics& m) {
  std::ostringstream t;
  t << "kind\tevents\n";
  for (const auto& [kind, count] : m.events_by_kind) t << kind << '\t' << count << '\n';
  return t.str();
}

std::string run_line(const SimRun& r, const std::string& label, const std::string& mechs) {
  const auto& m = r.metrics;
  std::ostringstream t;
  t << label << '\t' << mechs << '\t' << (m.tragedy ? "true" : "false") << '\t'
    << (m.depletion_tick ? std::to_string(*m.depletion_tick) : "-") << '\t'
    << fixed6(m.completion) << '\t'
    << (m.first_greed_reduction ? std::to_string(*m.first_greed_reduction) : "-") << '\t'
    << m.accepted << '\t' << m.rejected << '\t' << to_hex(state_hash(r.final_state)) << '\n';
  return t.str();
}

}  // namespace

Result<std::filesystem::path> write_run(const std::filesystem::path& dir, const Scenario& s,
                                        const SimRun& run) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return Error{Errc::InvalidPayload, dir.string() + ": " + ec.message()};

  if (auto st = run.log.save(dir / "events.log"); !st.ok()) return st.error();

  CanonicalWriter gw;
  encode_state(gw, run.genesis);
  Bytes gbytes = gw.take();
  {
    std::ofstream out(dir / "genesis.bin", std::ios::binary);
    if (!out) return Error{Errc::InvalidPayload, (dir / "genesis.bin").string() + ": cannot open"};
    out.write(reinterpret_cast<const char*>(gbytes.data()),
              static_cast<std::streamsize>(gbytes.size()));
    if (!out) return Error{Errc::InvalidPayload, (dir / "genesis.bin").string() + ": write failed"};
  }

  auto cov = coverage::report(run.genesis, run.log);
  if (!cov.ok()) return cov.error();

  auto final_hash = state_hash(run.final_state);

  if (auto st = write_text(dir / "summary.tsv", summary_tsv(s, run, final_hash)); !st.ok())
    return st.error();
  if (auto st = write_text(dir / "timeseries.tsv", timeseries_tsv(run.metrics)); !st.ok())
    return st.error();
  if (auto st = write_text(dir / "ppc.tsv", ppc_tsv(run.metrics)); !st.ok()) return st.error();
  if (auto st = write_text(dir / "kinds.tsv", kinds_tsv(run.metrics)); !st.ok()) return st.error();
  if (auto st = write_text(dir / "coverage.tsv", coverage::to_tsv(cov.value())); !st.ok())
    return st.error();

  json manifest;
  manifest["name"] = s.name;
  manifest["engine_version"] = std::string(kEngineVersion);
  manifest["scenario_sha256"] = to_hex(s.source_digest);
  manifest["seed"] = s.seed;
  manifest["ticks"] = s.ticks;
  manifest["mechanisms_on"] = mechanisms_line(s);
  manifest["genesis_sha256"] = to_hex(run.log.genesis);
  manifest["final_state_sha256"] = to_hex(final_hash);
  manifest["events"] = run.log.events.size();
  manifest["files"] = {{"log", "events.log"},
                       {"genesis", "genesis.bin"},
                       {"summary", "summary.tsv"},
                       {"timeseries", "timeseries.tsv"},
                       {"ppc", "ppc.tsv"},
                       {"kinds", "kinds.tsv"},
                       {"coverage", "coverage.tsv"}};
  manifest["metrics"] = {
      {"packages_total", run.metrics.packages_total},
      {"packages_done", run.metrics.packages_done},
      {"completion", run.metrics.completion},
      {"tragedy", run.metrics.tragedy},
      {"events_accepted", run.metrics.accepted},
      {"events_rejected", run.metrics.rejected},
      {"mechanisms_hit", cov.value().mechanisms_hit()},
      {"applications_hit", cov.value().applications_hit()},
  };
  if (run.metrics.depletion_tick) manifest["metrics"]["depletion_tick"] = *run.metrics.depletion_tick;

  auto path = dir / "manifest.json";
  if (auto st = write_text(path, manifest.dump(2) + "\n"); !st.ok()) return st.error();
  return path;
}

Result<ManifestInfo> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return Error{Errc::InvalidPayload, file.string() + ": cannot open"};
  std::ostringstream ss;
  ss << in.rdbuf();

  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    return Error{Errc::InvalidPayload, file.string() + ": json: " + e.what()};
  }

  auto hex_digest = [&](const char* key) -> Result<Digest32> {
    if (!doc.contains(key) || !doc[key].is_string())
      return Error{Errc::InvalidPayload, file.string() + ": missing \"" + key + '"'};
    auto raw = from_hex(doc[key].get<std::string>());
    if (!raw || raw->size() != 32)
      return Error{Errc::InvalidPayload, file.string() + ": bad digest in \"" + key + '"'};
    Digest32 d;
    std::copy(raw->begin(), raw->end(), d.v.begin());
    return d;
  };

  ManifestInfo info;
  if (doc.contains("name") && doc["name"].is_string()) info.name = doc["name"];
  if (doc.contains("seed") && doc["seed"].is_number_unsigned())
    info.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("events") && doc["events"].is_number_unsigned())
    info.events = doc["events"].get<std::uint64_t>();
  auto sd = hex_digest("scenario_sha256");
  if (!sd.ok()) return sd.error();
  info.scenario_digest = sd.value();
  auto gd = hex_digest("genesis_sha256");
  if (!gd.ok()) return gd.error();
  info.genesis = gd.value();
  auto fd = hex_digest("final_state_sha256");
  if (!fd.ok()) return fd.error();
  info.final_hash = fd.value();

  auto base = file.parent_path();
  std::string log = "events.log";
  std::string gbin = "genesis.bin";
  if (doc.contains("files") && doc["files"].is_object()) {
    const auto& files = doc["files"];
    if (files.contains("log") && files["log"].is_string()) log = files["log"];
    if (files.contains("genesis") && files["genesis"].is_string()) gbin = files["genesis"];
  }
  info.log = base / log;
  info.genesis_bin = base / gbin;
  return info;
}

std::string ab_table(const sim::AbResult& ab) {
  std::ostringstream t;
  t << "run\tmechanisms_on\ttragedy\tdepletion_tick\tcompletion\tfirst_greed_reduction\t"
       "accepted\trejected\tfinal_state\n";
  auto mechs = [&](const WorldState& w) {
    std::string on;
    for (int m = 1; m <= kMechanismCount; ++m) {
      if (!w.mechanism_on(m)) continue;
      if (!on.empty()) on += ',';
      on += mechanism_tag(m);
    }
    return on;
  };
  t << run_line(ab.a, "A", mechs(ab.a.genesis));
  t << run_line(ab.b, "B", mechs(ab.b.genesis));
  return t.str();
}

}  // namespace commons::reports
