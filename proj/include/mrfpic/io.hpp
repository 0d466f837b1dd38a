#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "estimator.hpp"
#include "lattice.hpp"
#include "model.hpp"
#include "sampler.hpp"

namespace mrfpic {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------------------------
// Dimensions and neighborhoods as text

/// "64x64" -> {64, 64}.
inline std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find('x', pos);
    const std::string part = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError("malformed dims '" + text + "': expected lengths joined by 'x'");
    }
    const long v = std::stol(part);
    if (v < 1 || v > (1L << 24)) throw ValidationError("axis length out of range in '" + text + "'");
    dims.push_back(static_cast<int>(v));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return dims;
}

inline std::string format_dims(const std::vector<int>& dims) {
  std::string out;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (k) out += 'x';
    out += std::to_string(dims[k]);
  }
  return out;
}

struct ParsedNeighborhood {
  Neighborhood gamma;
  bool symmetrized = false;  // input was not closed under negation
};

/// Parses "(dx,dy);(dx,dy);..." (or "" / "{}" for the empty set). Offsets missing their negation are added.
inline ParsedNeighborhood parse_neighborhood(const std::string& text, int d) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> void {
    throw ValidationError("neighborhood parse error at position " + std::to_string(pos) + ": " + what);
  };
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  std::vector<Site> offsets;
  skip_ws();
  if (text.compare(pos, 2, "{}") == 0) {
    pos += 2;
    skip_ws();
    if (pos != text.size()) fail("unexpected trailing input");
    return {Neighborhood(d), false};
  }
  while (pos < text.size()) {
    if (text[pos] != '(') fail("expected '('");
    ++pos;
    std::vector<int> coords;
    while (true) {
      skip_ws();
      const std::size_t start = pos;
      if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == start || !std::isdigit(static_cast<unsigned char>(text[pos - 1]))) {
        pos = start;
        fail("expected an integer");
      }
      coords.push_back(std::stoi(text.substr(start, pos - start)));
      skip_ws();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos < text.size() && text[pos] == ')') {
        ++pos;
        break;
      }
      fail("expected ',' or ')'");
    }
    if (static_cast<int>(coords.size()) != d) {
      fail("offset has " + std::to_string(coords.size()) + " coordinates, expected " + std::to_string(d));
    }
    Site v(coords);
    if (v.is_zero()) fail("the origin is not a valid offset");
    offsets.push_back(v);
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] != ';') fail("expected ';'");
    ++pos;
    skip_ws();
  }
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  bool closed = true;
  for (const Site& v : offsets) {
    if (!std::binary_search(offsets.begin(), offsets.end(), -v)) closed = false;
  }
  return {Neighborhood::symmetrized(d, offsets), !closed};
}

// ---------------------------------------------------------------------------------------------
// Sample files (.mrfs)
//
//   MRFS 1 d=<d> dims=<l1>x...x<ld> m=<m>
//   # model=<id> seed=<seed> sweeps=<n> burn_in=<n>      (optional comment lines)
//   <symbols, whitespace separated, row-major, one line per last-axis row>

inline void write_sample(std::ostream& out, const Sample& s) {
  const auto dims = s.region.dims();
  out << "MRFS 1 d=" << s.dim() << " dims=" << format_dims(dims) << " m=" << s.alphabet << '\n';
  if (!s.model_id.empty()) {
    out << "# model=" << s.model_id << " seed=" << s.seed << " sweeps=" << s.sweeps << " burn_in=" << s.burn_in
        << '\n';
  }
  const auto row = static_cast<std::size_t>(dims.back());
  std::string line;
  for (std::size_t i = 0; i < s.symbols.size(); ++i) {
    line += std::to_string(s.symbols[i]);
    if ((i + 1) % row == 0) {
      line += '\n';
      out << line;
      line.clear();
    } else {
      line += ' ';
    }
  }
}

inline void write_sample_file(const std::string& path, const Sample& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_sample(out, s);
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline Sample read_sample(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ValidationError("empty sample file");
  std::istringstream hs(header);
  std::string magic, version, dtok, dimstok, mtok;
  hs >> magic >> version >> dtok >> dimstok >> mtok;
  if (magic != "MRFS" || version != "1") throw ValidationError("not an MRFS version 1 sample file");
  if (dtok.rfind("d=", 0) != 0 || dimstok.rfind("dims=", 0) != 0 || mtok.rfind("m=", 0) != 0) {
    throw ValidationError("malformed MRFS header: '" + header + "'");
  }
  const int d = std::stoi(dtok.substr(2));
  const std::vector<int> dims = parse_dims(dimstok.substr(5));
  const int m = std::stoi(mtok.substr(2));
  if (static_cast<int>(dims.size()) != d) throw ValidationError("header dimension disagrees with dims");
  if (m < 2 || m > 256) throw ValidationError("alphabet size out of range in header");

  Sample s;
  s.region = Region::from_dims(dims);
  s.alphabet = m;
  s.symbols.reserve(s.region.volume());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string kv;
      while (ls >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "model") s.model_id = val;
        else if (key == "seed") s.seed = std::stoull(val);
        else if (key == "sweeps") s.sweeps = std::stoi(val);
        else if (key == "burn_in") s.burn_in = std::stoi(val);
      }
      continue;
    }
    std::istringstream ls(line);
    long v;
    while (ls >> v) {
      if (v < 0 || v >= m) throw ValidationError("symbol " + std::to_string(v) + " outside the alphabet");
      s.symbols.push_back(static_cast<std::uint8_t>(v));
    }
    if (!ls.eof()) throw ValidationError("non-numeric token in sample body");
  }
  if (s.symbols.size() != s.region.volume()) {
    throw ValidationError("sample body has " + std::to_string(s.symbols.size()) + " symbols, header promises " +
                          std::to_string(s.region.volume()));
  }
  return s;
}

inline Sample read_sample_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_sample(in);
}

// ---------------------------------------------------------------------------------------------
// Potentials as JSON
//
//   {"family": "ising" | "potts" | "custom", "d": 2, "m": 2, "beta": 0.3, "range": 1,
//    "interaction": "nn" | "ball", "field": [..m reals..],
//    "couplings": [{"offset": [1, 0], "value": 0.3}, ...]}     (custom only)

inline Potential potential_from_json(const Json& j) {
  const std::string family = j.value("family", std::string("ising"));
  const int d = j.value("d", 2);
  const int range = j.value("range", 1);
  const std::string inter = j.value("interaction", std::string("nn"));
  if (inter != "nn" && inter != "ball") throw ValidationError("interaction must be 'nn' or 'ball'");
  const bool ball = inter == "ball";
  if (family == "ising") {
    if (j.value("m", 2) != 2) throw ValidationError("the ising family has alphabet size 2");
    const double beta = j.value("beta", 0.0);
    std::vector<double> field = j.value("field", std::vector<double>{});
    auto terms = Potential::ising(d, beta, range, ball).terms();
    return Potential(d, 2, terms, field, range, "ising");
  }
  if (family == "potts") {
    const int m = j.value("m", 3);
    const double beta = j.value("beta", 0.0);
    std::vector<double> field = j.value("field", std::vector<double>{});
    auto terms = Potential::potts(d, m, beta, range, ball).terms();
    return Potential(d, m, terms, field, range, "potts");
  }
  if (family == "custom") {
    const int m = j.value("m", 2);
    std::vector<PairTerm> terms;
    for (const auto& c : j.at("couplings")) {
      terms.push_back({Site(c.at("offset").get<std::vector<int>>()), c.at("value").get<double>()});
    }
    std::vector<double> field = j.value("field", std::vector<double>{});
    return Potential(d, m, terms, field, j.value("range", 0), "custom");
  }
  throw ValidationError("unknown model family '" + family + "'");
}

inline Json potential_to_json(const Potential& p) {
  Json j;
  j["family"] = "custom";
  j["id"] = p.id();
  j["d"] = p.dim();
  j["m"] = p.alphabet();
  j["range"] = p.range();
  j["field"] = p.field();
  Json cs = Json::array();
  for (const PairTerm& t : p.terms()) cs.push_back({{"offset", t.offset.coords()}, {"value", t.coupling}});
  j["couplings"] = cs;
  return j;
}

// ---------------------------------------------------------------------------------------------
// Reports

inline Json region_json(const std::optional<Region>& r) {
  if (!r) return nullptr;
  return {{"lo", r->lo().coords()}, {"hi", r->hi().coords()}, {"volume", r->volume()}};
}

inline std::string block_string(const BlockKey& k, int m) {
  std::string out;
  for (std::uint8_t s : k.decode(m)) out += std::to_string(s);
  return out;
}

inline Json estimate_report_json(const Sample& s, const PicReport& rep) {
  Json j;
  j["report"] = "mrfpic-estimate";
  j["version"] = 1;
  j["sample"] = {{"d", s.dim()}, {"dims", format_dims(s.region.dims())}, {"m", s.alphabet}, {"volume", s.region.volume()}};
  j["window"] = {{"width", rep.window_width}, {"region", region_json(rep.window_region)}};
  j["radius"] = rep.radius;
  j["forced_radius"] = rep.forced_radius;
  j["count_width"] = rep.count_width;
  j["count_region"] = region_json(rep.count_region);
  j["c"] = rep.c;
  j["candidate_count"] = rep.candidates.size();
  j["selected"] = rep.selected().to_string();
  j["selected_index"] = rep.selected_index;
  j["selected_pic"] = rep.best().pic;
  j["runner_up_margin"] = rep.candidates.size() > 1 ? Json(rep.runner_up_margin()) : Json(nullptr);
  j["tie_tolerance"] = kTieTolerance;
  j["tie_rule"] = "smallest pic, then smallest |gamma|, then smallest radius, then candidate order";
  j["ties"] = rep.ties;
  Json rows = Json::array();
  for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
    const auto& cv = rep.candidates[i];
    rows.push_back({{"index", i},
                    {"gamma", cv.gamma.to_string()},
                    {"size", cv.gamma.size()},
                    {"radius", cv.gamma.radius()},
                    {"log_mpl", cv.log_mpl},
                    {"penalty", cv.penalty},
                    {"pic", cv.pic}});
  }
  j["candidates"] = rows;
  return j;
}

inline Json specification_json(const Specification& spec) {
  Json rows = Json::array();
  const int m = spec.alphabet();
  for (const auto& [block, probs] : spec.rows()) rows.push_back({{"block", block_string(block, m)}, {"probabilities", probs}});
  return {{"gamma", spec.gamma().to_string()}, {"m", m}, {"block_order", "offsets in gamma order"}, {"rows", rows}};
}

inline Json typicality_json(const TypicalityReport& rep, int m) {
  Json rows = Json::array();
  for (const auto& r : rep.records) {
    rows.push_back({{"block", block_string(r.block, m)},
                    {"center", r.center},
                    {"block_count", r.block_count},
                    {"joint_count", r.joint_count},
                    {"ratio", r.ratio},
                    {"truth", r.truth},
                    {"deviation", r.deviation},
                    {"bound", r.bound},
                    {"pass", r.pass}});
  }
  return {{"gamma", rep.gamma.to_string()},
          {"alpha", rep.alpha},
          {"kappa", rep.kappa},
          {"pass", rep.failures() == 0},
          {"failures", rep.failures()},
          {"records", rows},
          {"worst_margin", rep.records.empty() ? Json(nullptr) : Json(rep.worst_margin)}};
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace mrfpic
