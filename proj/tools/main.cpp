// commons: validate, run, replay, audit, and A/B-compare governance
// scenarios. Exit codes: 0 success, 1 invalid input, 2 runtime failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "commons/concept_map.hpp"
#include "commons/coverage.hpp"
#include "commons/engine.hpp"
#include "commons/ledger.hpp"
#include "commons/reports.hpp"
#include "commons/scenario.hpp"
#include "commons/sim.hpp"
#include "commons/support/bytes.hpp"
#include "commons/support/codec.hpp"
#include "commons/world.hpp"

namespace {

using namespace commons;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::optional<Bytes> read_bytes(const std::filesystem::path& p) {
  auto text = read_file(p);
  if (!text) return std::nullopt;
  return Bytes(text->begin(), text->end());
}

/// "M4,M11" or "4 11" (repeated flag) to mechanism numbers.
std::optional<std::vector<int>> parse_mechanism_ids(const std::vector<std::string>& raw,
                                                    std::string& err) {
  std::vector<int> out;
  std::set<int> seen;
  for (const auto& chunk : raw) {
    std::stringstream ss(chunk);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::string digits = (tok[0] == 'M' || tok[0] == 'm') ? tok.substr(1) : tok;
      int m = 0;
      try {
        std::size_t used = 0;
        m = std::stoi(digits, &used);
        if (used != digits.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        err = "not a mechanism id: \"" + tok + '"';
        return std::nullopt;
      }
      if (m < 1 || m > 14) {
        err = "mechanism out of range: \"" + tok + '"';
        return std::nullopt;
      }
      if (seen.insert(m).second) out.push_back(m);
    }
  }
  return out;
}

// --- concept map files ----------------------------------------------------

struct MapFail {
  std::string msg;
};

const json& need(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw MapFail{path + ": missing field \"" + std::string(key) + '"'};
  return *it;
}

std::string need_str(const json& obj, const std::string& path, const char* key) {
  const json& v = need(obj, path, key);
  if (!v.is_string()) throw MapFail{path + "." + key + ": expected a string"};
  return v.get<std::string>();
}

void each_object(const json& doc, const std::string& path, const char* key,
                 const std::function<void(const json&, const std::string&)>& fn) {
  const json& arr = need(doc, path, key);
  if (!arr.is_array()) throw MapFail{path + "." + key + ": expected an array"};
  std::size_t i = 0;
  for (const auto& item : arr) {
    auto ipath = path + "." + key + "[" + std::to_string(i++) + "]";
    if (!item.is_object()) throw MapFail{ipath + ": expected an object"};
    fn(item, ipath);
  }
}

ConceptMap parse_concept_map(const json& doc) {
  if (!doc.is_object()) throw MapFail{"$: expected an object"};
  for (const auto& [k, v] : doc.items()) {
    if (k != "principles" && k != "mechanisms" && k != "applications" && k != "edges")
      throw MapFail{"$." + k + ": unknown field"};
  }

  ConceptMap map;
  each_object(doc, "$", "principles", [&](const json& it, const std::string& path) {
    Principle p;
    p.id = need_str(it, path, "id");
    p.name = need_str(it, path, "name");
    p.practice = need_str(it, path, "practice");
    if (auto subs = it.find("subs"); subs != it.end()) {
      if (!subs->is_array()) throw MapFail{path + ".subs: expected an array"};
      for (const auto& s : *subs) {
        if (!s.is_string()) throw MapFail{path + ".subs: expected strings"};
        p.subs.push_back(s.get<std::string>());
      }
    }
    for (const auto& [k, v] : it.items())
      if (k != "id" && k != "name" && k != "practice" && k != "subs")
        throw MapFail{path + "." + k + ": unknown field"};
    map.principles.push_back(std::move(p));
  });
  each_object(doc, "$", "mechanisms", [&](const json& it, const std::string& path) {
    for (const auto& [k, v] : it.items())
      if (k != "id" && k != "name" && k != "principle")
        throw MapFail{path + "." + k + ": unknown field"};
    map.mechanisms.push_back(Mechanism{need_str(it, path, "id"), need_str(it, path, "name"),
                                       need_str(it, path, "principle")});
  });
  each_object(doc, "$", "applications", [&](const json& it, const std::string& path) {
    for (const auto& [k, v] : it.items())
      if (k != "id" && k != "name" && k != "mechanism" && k != "principle")
        throw MapFail{path + "." + k + ": unknown field"};
    map.applications.push_back(Application{need_str(it, path, "id"), need_str(it, path, "name"),
                                           need_str(it, path, "mechanism"),
                                           need_str(it, path, "principle")});
  });
  each_object(doc, "$", "edges", [&](const json& it, const std::string& path) {
    for (const auto& [k, v] : it.items())
      if (k != "from" && k != "to") throw MapFail{path + "." + k + ": unknown field"};
    map.edges.push_back(ConceptEdge{need_str(it, path, "from"), need_str(it, path, "to")});
  });
  return map;
}

int validate_concept_map(const std::filesystem::path& file, const json& doc) {
  ConceptMap map;
  try {
    map = parse_concept_map(doc);
  } catch (const MapFail& f) {
    std::cerr << file.string() << ": " << f.msg << "\n";
    return kInvalid;
  }
  auto violations = concept_map::validate(map);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << file.string() << ": " << v << "\n";
    return kInvalid;
  }
  std::cout << "concept map: " << map.principles.size() << " principles, "
            << map.mechanisms.size() << " mechanisms, " << map.applications.size()
            << " applications, " << map.edges.size() << " edges\nvalid\n";
  return kOk;
}

// --- subcommands ------------------------------------------------------------

int cmd_validate(const std::filesystem::path& file) {
  auto text = read_file(file);
  if (!text) {
    std::cerr << file.string() << ": cannot open\n";
    return kRuntime;
  }
  json doc;
  try {
    doc = json::parse(*text);
  } catch (const json::parse_error& e) {
    std::cerr << file.string() << ": json: " << e.what() << "\n";
    return kInvalid;
  }
  // A concept map carries an applications table; scenarios never do.
  if (doc.is_object() && doc.contains("applications")) return validate_concept_map(file, doc);

  auto parsed = scenario::parse(*text, std::nullopt);
  if (!parsed.ok()) {
    std::cerr << file.string() << ": " << parsed.error().detail << "\n";
    return kInvalid;
  }
  const Scenario& s = parsed.value();
  std::cout << "scenario " << s.name << ": " << s.actors.size() << " actors, " << s.ticks
            << " ticks, " << s.script.size() << " scripted events, " << s.agents.size()
            << " agents\nvalid\n";
  return kOk;
}

int cmd_run(const std::filesystem::path& file, std::uint64_t seed,
            const std::filesystem::path& out, const std::vector<std::string>& disable_raw) {
  std::string err;
  auto disable = parse_mechanism_ids(disable_raw, err);
  if (!disable) {
    std::cerr << "--disable: " << err << "\n";
    return kInvalid;
  }
  auto loaded = scenario::load(file, seed);
  if (!loaded.ok()) {
    std::cerr << file.string() << ": " << loaded.error().detail << "\n";
    return kInvalid;
  }
  Scenario s = std::move(loaded).value();
  for (int m : *disable) {
    if (m == 7) {
      std::cerr << "--disable: M7 cannot be disabled\n";
      return kInvalid;
    }
    s.mech[static_cast<std::size_t>(m)] = false;
  }

  auto run = sim::run(s);
  if (!run.ok()) {
    std::cerr << "run failed: " << run.error().to_string() << "\n";
    return kRuntime;
  }
  auto manifest = reports::write_run(out, s, run.value());
  if (!manifest.ok()) {
    std::cerr << "write failed: " << manifest.error().to_string() << "\n";
    return kRuntime;
  }

  const SimMetrics& m = run.value().metrics;
  std::cout << "run " << s.name << " seed " << s.seed << ": " << m.accepted
            << " events accepted, " << m.rejected << " rejected\n";
  std::cout << "packages " << m.packages_done << "/" << m.packages_total;
  if (m.depletion_tick) std::cout << ", pool depleted at tick " << *m.depletion_tick;
  std::cout << "\ntragedy: " << (m.tragedy ? "yes" : "no") << "\n";
  std::cout << "final state " << to_hex(state_hash(run.value().final_state)) << "\n";
  std::cout << "wrote " << manifest.value().string() << "\n";
  return kOk;
}

int audit_conservation(const WorldState& w) {
  for (const auto& [cls, tc] : w.classes) {
    Amount sum = 0;
    for (const auto& [addr, amt] : tc.balances) sum += amt;
    if (sum != tc.total_supply) {
      std::cerr << "conservation violated for class " << cls << ": balances sum to " << sum
                << ", supply says " << tc.total_supply << "\n";
      return kRuntime;
    }
  }
  std::cout << "conservation: " << w.classes.size() << " token classes balanced\n";
  return kOk;
}

int cmd_replay(const std::filesystem::path& log_path) {
  std::ifstream in(log_path, std::ios::binary);
  if (!in) {
    std::cerr << log_path.string() << ": cannot open\n";
    return kRuntime;
  }

  std::string line;
  if (!std::getline(in, line)) {
    std::cerr << log_path.string() << ": empty log\n";
    return kRuntime;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto genesis_digest = digest_from_hex(line);
  if (!genesis_digest) {
    std::cerr << log_path.string() << ": bad genesis digest line\n";
    return kRuntime;
  }

  // Decode leniently so a truncated or scribbled-on log still reports how
  // far it stayed valid.
  EventLog log;
  log.genesis = *genesis_digest;
  std::optional<std::size_t> cut_line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto raw = from_hex(line);
    if (!raw) {
      cut_line = lineno;
      break;
    }
    auto ev = decode_event(*raw);
    if (!ev.ok()) {
      cut_line = lineno;
      break;
    }
    log.events.push_back(std::move(ev).value());
  }

  auto genesis_bytes = read_bytes(log_path.parent_path() / "genesis.bin");
  if (!genesis_bytes) {
    std::cerr << "genesis.bin not found next to the log\n";
    return kRuntime;
  }
  if (!(crypto::sha256(*genesis_bytes) == log.genesis)) {
    std::cerr << "genesis.bin does not hash to the log's genesis digest\n";
    return kRuntime;
  }
  WorldState state;
  try {
    CanonicalReader r(*genesis_bytes);
    state = decode_state(r);
    if (!r.exhausted()) throw DecodeError{"trailing bytes"};
  } catch (const DecodeError& e) {
    std::cerr << "genesis.bin: " << e.what() << "\n";
    return kRuntime;
  }
  if (!(state_hash(state) == log.genesis)) {
    std::cerr << "genesis state does not hash to the log's genesis digest\n";
    return kRuntime;
  }

  Seq last_valid = 0;
  bool any = false;
  for (const auto& ev : log.events) {
    if (auto s = fold_event(state, log.genesis, ev); !s.ok()) {
      std::cerr << "replay stopped at event " << ev.seq << ": " << s.error().to_string() << "\n";
      if (any) std::cerr << "last valid seq " << last_valid << "\n";
      return kRuntime;
    }
    last_valid = ev.seq;
    any = true;
  }

  if (cut_line) {
    std::cerr << log_path.string() << ": undecodable line " << *cut_line << "; ";
    if (any)
      std::cerr << "last valid seq " << last_valid << "\n";
    else
      std::cerr << "no valid events before it\n";
    return kRuntime;
  }

  std::cout << "replayed " << log.events.size() << " events\n";
  std::cout << "final state " << to_hex(state_hash(state)) << "\n";
  return audit_conservation(state);
}

int cmd_coverage(const std::filesystem::path& manifest_path) {
  auto info = reports::read_manifest(manifest_path);
  if (!info.ok()) {
    std::cerr << manifest_path.string() << ": " << info.error().to_string() << "\n";
    return kRuntime;
  }
  auto log = EventLog::load(info.value().log);
  if (!log.ok()) {
    std::cerr << info.value().log.string() << ": " << log.error().to_string() << "\n";
    return kRuntime;
  }
  if (!(log.value().genesis == info.value().genesis)) {
    std::cerr << "log genesis does not match the manifest\n";
    return kRuntime;
  }
  auto genesis_bytes = read_bytes(info.value().genesis_bin);
  if (!genesis_bytes || !(crypto::sha256(*genesis_bytes) == info.value().genesis)) {
    std::cerr << "genesis.bin missing or does not match the manifest\n";
    return kRuntime;
  }
  WorldState genesis;
  try {
    CanonicalReader r(*genesis_bytes);
    genesis = decode_state(r);
  } catch (const DecodeError& e) {
    std::cerr << "genesis.bin: " << e.what() << "\n";
    return kRuntime;
  }

  auto replayed = replay(log.value(), genesis);
  if (!replayed.ok()) {
    std::cerr << "replay: " << replayed.error().to_string() << "\n";
    return kRuntime;
  }
  if (!(state_hash(replayed.value()) == info.value().final_hash)) {
    std::cerr << "final state hash does not match the manifest\n";
    return kRuntime;
  }

  auto report = coverage::report(std::move(genesis), log.value());
  if (!report.ok()) {
    std::cerr << "coverage: " << report.error().to_string() << "\n";
    return kRuntime;
  }
  const CoverageReport& r = report.value();
  std::cout << coverage::to_tsv(r);
  std::cout << "mechanisms hit: " << r.mechanisms_hit() << "/14\n";
  std::cout << "applications hit: " << r.applications_hit() << "/22\n";
  for (const auto& gap : r.mechanism_gaps) std::cout << "gap: " << gap << "\n";
  for (const auto& gap : r.application_gaps) std::cout << "gap: " << gap << "\n";
  return kOk;
}

int cmd_ab(const std::filesystem::path& file, std::uint64_t seed,
           const std::vector<std::string>& switch_raw) {
  std::string err;
  auto switches = parse_mechanism_ids(switch_raw, err);
  if (!switches) {
    std::cerr << "--switch: " << err << "\n";
    return kInvalid;
  }
  if (switches->empty()) {
    std::cerr << "--switch: no mechanisms listed\n";
    return kInvalid;
  }
  auto loaded = scenario::load(file, seed);
  if (!loaded.ok()) {
    std::cerr << file.string() << ": " << loaded.error().detail << "\n";
    return kInvalid;
  }
  auto ab = sim::ab_compare(loaded.value(), *switches);
  if (!ab.ok()) {
    bool bad_input = ab.error().code == Errc::InvalidScenario;
    std::cerr << "ab: " << ab.error().to_string() << "\n";
    return bad_input ? kInvalid : kRuntime;
  }
  std::cout << reports::ab_table(ab.value());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"commons governance kernel"};
  app.require_subcommand(1);

  std::filesystem::path file;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::vector<std::string> disable;
  std::vector<std::string> switches;

  auto* validate = app.add_subcommand("validate", "check a scenario or concept map file");
  validate->add_option("file", file, "json file")->required();

  auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
  run->add_option("file", file, "scenario json")->required();
  run->add_option("--seed", seed, "world seed")->required();
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--disable", disable, "mechanisms to turn off, e.g. M4,M11");

  auto* replay = app.add_subcommand("replay", "fold an event log and audit the result");
  replay->add_option("log", file, "events.log written by run")->required();

  auto* coverage = app.add_subcommand("coverage", "attribute a run's events to the concept map");
  coverage->add_option("manifest", file, "manifest.json written by run")->required();

  auto* ab = app.add_subcommand("ab", "paired runs with mechanisms switched");
  ab->add_option("file", file, "scenario json")->required();
  ab->add_option("--switch", switches, "mechanisms to flip in run B, e.g. M4,M11")->required();
  ab->add_option("--seed", seed, "world seed")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(file);
  if (run->parsed()) return cmd_run(file, seed, out, disable);
  if (replay->parsed()) return cmd_replay(file);
  if (coverage->parsed()) return cmd_coverage(file);
  if (ab->parsed()) return cmd_ab(file, seed, switches);
  return kInvalid;
}
