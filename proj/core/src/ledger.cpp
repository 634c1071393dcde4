#include "commons/ledger.hpp"

#include <fstream>
#include <string>

#include "commons/support/codec.hpp"

namespace commons {

Bytes event_preimage(const Digest32& genesis, Seq seq, const AddressId& author, Tick tick,
                     const Command& payload) {
  CanonicalWriter w;
  w.str("evt");
  w.digest(genesis);
  w.u64(seq);
  w.digest(author);
  w.u64(tick);
  encode_command(w, payload);
  return w.take();
}

Bytes encode_event(const SignedEvent& ev) {
  CanonicalWriter w;
  w.u64(ev.seq);
  w.digest(ev.author);
  w.u64(ev.tick);
  CanonicalWriter cw;
  encode_command(cw, ev.payload);
  w.bytes(cw.data());
  w.raw(ev.sig.data(), ev.sig.size());
  return w.take();
}

Result<SignedEvent> decode_event(const Bytes& raw) {
  try {
    CanonicalReader r(raw);
    SignedEvent ev;
    ev.seq = r.u64();
    ev.author = r.digest();
    ev.tick = r.u64();
    Bytes cmd = r.bytes();
    CanonicalReader cr(cmd);
    ev.payload = decode_command(cr);
    if (!cr.exhausted()) return Error{Errc::CorruptLog, "trailing bytes in command"};
    r.raw(ev.sig.data(), ev.sig.size());
    if (!r.exhausted()) return Error{Errc::CorruptLog, "trailing bytes after event"};
    return ev;
  } catch (const std::exception& e) {
    return Error{Errc::CorruptLog, e.what()};
  }
}

Status EventLog::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return Error{Errc::CorruptLog, "cannot open " + path.string()};
  out << to_hex(genesis) << '\n';
  for (const auto& ev : events) out << to_hex(encode_event(ev)) << '\n';
  out.flush();
  if (!out) return Error{Errc::CorruptLog, "short write to " + path.string()};
  return ok_status();
}

Result<EventLog> EventLog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Errc::CorruptLog, "cannot open " + path.string()};

  EventLog log;
  std::string line;
  if (!std::getline(in, line)) return Error{Errc::CorruptLog, "empty log"};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto genesis = digest_from_hex(line);
  if (!genesis) return Error{Errc::CorruptLog, "bad genesis digest line"};
  log.genesis = *genesis;

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto raw = from_hex(line);
    if (!raw) return Error{Errc::CorruptLog, "bad hex at line " + std::to_string(lineno)};
    auto ev = decode_event(*raw);
    if (!ev.ok())
      return Error{Errc::CorruptLog,
                   "line " + std::to_string(lineno) + ": " + ev.error().to_string()};
    log.events.push_back(std::move(ev).value());
  }
  return log;
}

}  // namespace commons
