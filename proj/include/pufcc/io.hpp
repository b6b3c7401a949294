#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pufcc/helper_data.hpp"
#include "pufcc/sha256.hpp"

namespace pufcc {

// SRAM snapshot text format:
//   line 1: "pufsnap v1 <t>"   (t = cell count)
//   then one hex-encoded readout per line, cell 0 in the MSB of the first nibble.
struct Snapshot {
  std::size_t cell_count = 0;
  std::vector<std::vector<int>> readouts;
};

inline void write_snapshot(std::ostream& os, const Snapshot& snap) {
  os << "pufsnap v1 " << snap.cell_count << "\n";
  for (const auto& r : snap.readouts) {
    if (r.size() != snap.cell_count) throw std::invalid_argument("write_snapshot: readout length mismatch");
    BitVec bits(r.begin(), r.end());
    auto bytes = pack_bits(bits);
    os << hex_encode(bytes.data(), bytes.size()) << "\n";
  }
}

inline Snapshot read_snapshot(std::istream& is) {
  Snapshot snap;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("snapshot: empty file");
  std::istringstream hdr(line);
  std::string magic, version;
  if (!(hdr >> magic >> version >> snap.cell_count) || magic != "pufsnap" || version != "v1")
    throw std::runtime_error("snapshot: bad header '" + line + "'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto bytes = hex_decode(line);
    BitVec bits = unpack_bits(bytes, snap.cell_count);
    snap.readouts.emplace_back(bits.begin(), bits.end());
  }
  if (snap.readouts.empty()) throw std::runtime_error("snapshot: no readouts");
  return snap;
}

inline void write_snapshot_file(const std::string& path, const Snapshot& snap) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_snapshot(os, snap);
}

inline Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_snapshot(is);
}

// Reliability sidecar: CSV "index,p_e".
inline void write_reliability_csv(std::ostream& os, const std::vector<double>& p_e) {
  os << "index,p_e\n";
  for (std::size_t i = 0; i < p_e.size(); ++i) {
    os << i << "," << p_e[i] << "\n";
  }
}

inline std::vector<double> read_reliability_csv(std::istream& is) {
  std::vector<double> p_e;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line.rfind("index", 0) == 0) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("reliability csv: bad line '" + line + "'");
    std::size_t idx = std::stoul(line.substr(0, comma));
    double v = std::stod(line.substr(comma + 1));
    if (idx >= p_e.size()) p_e.resize(idx + 1, 0.0);
    p_e[idx] = v;
  }
  if (p_e.empty()) throw std::runtime_error("reliability csv: no rows");
  return p_e;
}

inline void write_reliability_file(const std::string& path, const std::vector<double>& p_e) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_reliability_csv(os, p_e);
}

inline std::vector<double> read_reliability_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_reliability_csv(is);
}

// Helper-data JSON encoding.  The offset bit string packs bit 0 into the MSB
// of the first hex nibble.
inline nlohmann::json helper_to_json(const HelperData& h) {
  nlohmann::json j;
  j["version"] = h.version;
  j["code"] = h.code.to_text();
  if (h.p_t) {
    j["p_t"] = *h.p_t;
  } else {
    j["p_t"] = nullptr;
  }
  j["mask"] = h.mask;
  auto bytes = pack_bits(h.offset);
  j["offset"] = hex_encode(bytes.data(), bytes.size());
  j["digest"] = hex_encode(h.digest.data(), h.digest.size());
  j["list_size"] = h.list_size;
  j["readouts"] = h.readouts;
  j["decoder"] = to_string(h.decoder);
  return j;
}

inline HelperData helper_from_json(const nlohmann::json& j) {
  HelperData h;
  h.version = j.at("version").get<int>();
  if (h.version != 1) throw std::runtime_error("helper data: unsupported version");
  h.code = CodeSpec::from_text(j.at("code").get<std::string>());
  if (!j.at("p_t").is_null()) h.p_t = j.at("p_t").get<double>();
  h.mask = j.at("mask").get<std::vector<std::size_t>>();
  // the selection mask and the offset have equal length by construction
  h.offset = unpack_bits(hex_decode(j.at("offset").get<std::string>()), h.mask.size());
  auto dig = hex_decode(j.at("digest").get<std::string>());
  if (dig.size() != h.digest.size()) throw std::runtime_error("helper data: bad digest length");
  std::copy(dig.begin(), dig.end(), h.digest.begin());
  h.list_size = j.at("list_size").get<std::size_t>();
  h.readouts = j.at("readouts").get<int>();
  h.decoder = decoder_from_string(j.at("decoder").get<std::string>());
  if (h.mask.size() != h.offset.size()) throw std::runtime_error("helper data: mask/offset length mismatch");
  return h;
}

inline void write_helper_file(const std::string& path, const HelperData& h) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << helper_to_json(h).dump(2) << "\n";
}

inline HelperData read_helper_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  is >> j;
  return helper_from_json(j);
}

}  // namespace pufcc
