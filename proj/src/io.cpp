#include "mot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace mot {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::schema, path + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing field '") + key + "'");
  return *it;
}

const json& array_member(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_array()) schema_error(path + "." + key, "expected an array");
  return v;
}

Rational number(const json& v, const std::string& path) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(std::to_string(v.get<long long>()), 10);
    if (v.is_number_unsigned()) return Rational(std::to_string(v.get<unsigned long long>()), 10);
    if (v.is_number_float()) return rational_from_double(v.get<double>());
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
  schema_error(path, "expected a number or a numeric string");
}

std::string idx_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

}  // namespace

NumericMode parse_mode(std::string_view text) {
  if (text == "rational") return NumericMode::rational;
  if (text == "float") return NumericMode::floating;
  throw Error(ErrorKind::invalid_argument, "mode must be 'rational' or 'float'");
}

const char* to_string(NumericMode mode) {
  return mode == NumericMode::rational ? "rational" : "float";
}

Shape ProblemDocument::shape() const {
  std::vector<std::size_t> dims;
  for (const auto& m : marginals) dims.push_back(m.weights.size());
  return Shape(std::move(dims));
}

CostTensor<Rational> ProblemDocument::cost_tensor(std::size_t guard_entries) const {
  Shape s = shape();
  checked_size(s.dims(), guard_entries);
  if (cost.kind == CostSpec::Kind::tensor) {
    return CostTensor<Rational>::create(s, cost.entries);
  }
  std::vector<Rational> entries(s.size(), Rational(0));
  MultiIndex idx(s.order(), 0);
  std::size_t off = 0;
  do {
    for (const auto& term : cost.pairs) {
      entries[off] += term.matrix[idx[term.first]][idx[term.second]];
    }
    ++off;
  } while (advance(idx, s));
  return CostTensor<Rational>::create(s, std::move(entries));
}

ProblemDocument problem_from_json(const json& doc, NumericMode mode) {
  ProblemDocument out;
  const std::string root = "$";
  const json& version = member(doc, "version", root);
  if (!version.is_string() || version.get<std::string>() != kProblemVersion) {
    schema_error("$.version", std::string("expected \"") + kProblemVersion + "\"");
  }
  out.version = version.get<std::string>();

  const json& marginals = array_member(doc, "marginals", root);
  if (marginals.size() < 3) schema_error("$.marginals", "at least three marginals are required");
  if (auto k = doc.find("K"); k != doc.end()) {
    if (!k->is_number_unsigned() || k->get<std::size_t>() != marginals.size()) {
      schema_error("$.K", "must equal the number of marginals");
    }
  }
  for (std::size_t k = 0; k < marginals.size(); ++k) {
    const std::string path = idx_path("$.marginals", k);
    const json& m = marginals[k];
    MarginalSpec spec;
    const json& weights = array_member(m, "weights", path);
    if (weights.empty()) schema_error(path + ".weights", "marginal has no atoms");
    Rational total(0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      Rational w = number(weights[i], idx_path(path + ".weights", i));
      if (sgn(w) < 0) schema_error(idx_path(path + ".weights", i), "negative weight");
      total += w;
      spec.weights.push_back(w);
    }
    const bool unit = mode == NumericMode::rational ? total == 1
                                                    : std::fabs(total.get_d() - 1.0) <= 1e-12;
    if (!unit) {
      schema_error(path + ".weights", "weights sum to " + to_exact_string(total) + ", not 1");
    }
    if (auto atoms = m.find("atoms"); atoms != m.end()) {
      if (!atoms->is_array() || atoms->size() != weights.size()) {
        schema_error(path + ".atoms", "expected one label per weight");
      }
      for (std::size_t i = 0; i < atoms->size(); ++i) {
        const json& a = (*atoms)[i];
        if (a.is_string()) {
          spec.atoms.push_back(a.get<std::string>());
        } else if (a.is_number_integer()) {
          spec.atoms.push_back(std::to_string(a.get<long long>()));
        } else {
          schema_error(idx_path(path + ".atoms", i), "labels are strings or integers");
        }
      }
      if (std::set<std::string>(spec.atoms.begin(), spec.atoms.end()).size() != spec.atoms.size()) {
        schema_error(path + ".atoms", "labels are not distinct");
      }
    } else {
      for (std::size_t i = 0; i < weights.size(); ++i) spec.atoms.push_back(std::to_string(i));
    }
    if (auto coords = m.find("coords"); coords != m.end()) {
      if (!coords->is_array() || coords->size() != weights.size()) {
        schema_error(path + ".coords", "expected one coordinate vector per weight");
      }
      for (std::size_t i = 0; i < coords->size(); ++i) {
        const json& v = (*coords)[i];
        if (!v.is_array()) schema_error(idx_path(path + ".coords", i), "expected an array");
        std::vector<double> point;
        for (const json& x : v) {
          if (!x.is_number()) schema_error(idx_path(path + ".coords", i), "expected numbers");
          point.push_back(x.get<double>());
        }
        spec.coords.push_back(std::move(point));
      }
    }
    out.marginals.push_back(std::move(spec));
  }

  const Shape shape = out.shape();
  const json& cost = member(doc, "cost", root);
  const json& kind = member(cost, "kind", "$.cost");
  if (!kind.is_string()) schema_error("$.cost.kind", "expected a string");
  if (kind == "tensor") {
    out.cost.kind = CostSpec::Kind::tensor;
    if (auto order = cost.find("order"); order != cost.end() && *order != "row-major") {
      schema_error("$.cost.order", "only \"row-major\" (last index fastest) is supported");
    }
    const json& entries = array_member(cost, "entries", "$.cost");
    if (entries.size() != shape.size()) {
      schema_error("$.cost.entries", "expected " + std::to_string(shape.size()) +
                                         " entries (product of marginal sizes), got " +
                                         std::to_string(entries.size()) + "; first missing or " +
                                         "surplus index is " +
                                         std::to_string(std::min(entries.size(), shape.size())));
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out.cost.entries.push_back(number(entries[i], idx_path("$.cost.entries", i)));
    }
  } else if (kind == "pairwise-sum") {
    out.cost.kind = CostSpec::Kind::pairwise_sum;
    const json& matrices = array_member(cost, "matrices", "$.cost");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t t = 0; t < matrices.size(); ++t) {
      const std::string path = idx_path("$.cost.matrices", t);
      const json& pair = array_member(matrices[t], "pair", path);
      if (pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned()) {
        schema_error(path + ".pair", "expected two marginal indices");
      }
      PairwiseTerm term{pair[0].get<std::size_t>(), pair[1].get<std::size_t>(), {}};
      if (term.first >= term.second || term.second >= shape.order()) {
        schema_error(path + ".pair", "expected indices i < j < K");
      }
      if (!seen.insert({term.first, term.second}).second) {
        schema_error(path + ".pair", "duplicate pair");
      }
      const json& matrix = array_member(matrices[t], "matrix", path);
      if (matrix.size() != shape.extent(term.first)) {
        schema_error(path + ".matrix", "row count must equal the size of marginal " +
                                           std::to_string(term.first));
      }
      for (std::size_t i = 0; i < matrix.size(); ++i) {
        const std::string rpath = idx_path(path + ".matrix", i);
        if (!matrix[i].is_array() || matrix[i].size() != shape.extent(term.second)) {
          schema_error(rpath, "column count must equal the size of marginal " +
                                  std::to_string(term.second));
        }
        std::vector<Rational> row;
        for (std::size_t j = 0; j < matrix[i].size(); ++j) {
          row.push_back(number(matrix[i][j], idx_path(rpath, j)));
        }
        term.matrix.push_back(std::move(row));
      }
      out.cost.pairs.push_back(std::move(term));
    }
    const std::size_t expected = shape.order() * (shape.order() - 1) / 2;
    if (seen.size() != expected) {
      schema_error("$.cost.matrices", "expected one matrix per unordered pair (" +
                                          std::to_string(expected) + ")");
    }
    std::sort(out.cost.pairs.begin(), out.cost.pairs.end(), [](const auto& a, const auto& b) {
      return std::pair(a.first, a.second) < std::pair(b.first, b.second);
    });
  } else {
    schema_error("$.cost.kind", "expected \"tensor\" or \"pairwise-sum\"");
  }
  return out;
}

ProblemDocument parse_problem(std::string_view text, NumericMode mode) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema, std::string("$: malformed JSON: ") + e.what());
  }
  return problem_from_json(doc, mode);
}

json to_json(const ProblemDocument& doc) {
  json out;
  out["version"] = doc.version;
  out["K"] = doc.order();
  json marginals = json::array();
  for (const auto& m : doc.marginals) {
    json jm;
    jm["atoms"] = m.atoms;
    if (!m.coords.empty()) jm["coords"] = m.coords;
    json weights = json::array();
    for (const auto& w : m.weights) weights.push_back(to_exact_string(w));
    jm["weights"] = std::move(weights);
    marginals.push_back(std::move(jm));
  }
  out["marginals"] = std::move(marginals);
  json cost;
  if (doc.cost.kind == CostSpec::Kind::tensor) {
    cost["kind"] = "tensor";
    cost["order"] = "row-major";
    json entries = json::array();
    for (const auto& x : doc.cost.entries) entries.push_back(to_exact_string(x));
    cost["entries"] = std::move(entries);
  } else {
    cost["kind"] = "pairwise-sum";
    json matrices = json::array();
    for (const auto& term : doc.cost.pairs) {
      json rows = json::array();
      for (const auto& row : term.matrix) {
        json r = json::array();
        for (const auto& x : row) r.push_back(to_exact_string(x));
        rows.push_back(std::move(r));
      }
      matrices.push_back({{"pair", {term.first, term.second}}, {"matrix", std::move(rows)}});
    }
    cost["matrices"] = std::move(matrices);
  }
  out["cost"] = std::move(cost);
  return out;
}

std::string serialize_problem(const ProblemDocument& doc) { return to_json(doc).dump(2) + "\n"; }

template <Scalar T>
Instance<T> make_instance(const ProblemDocument& doc, std::vector<std::string>& warnings,
                          std::size_t guard_entries) {
  CostTensor<Rational> full = doc.cost_tensor(guard_entries);
  std::vector<std::vector<std::size_t>> keep(doc.order());
  bool pruned = false;
  for (std::size_t k = 0; k < doc.order(); ++k) {
    const auto& w = doc.marginals[k].weights;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (sgn(w[i]) > 0) keep[k].push_back(i);
    }
    if (keep[k].size() != w.size()) {
      pruned = true;
      warnings.push_back("marginal " + std::to_string(k) + ": pruned " +
                         std::to_string(w.size() - keep[k].size()) + " zero-weight atom(s)");
    }
  }
  Instance<Rational> exact{{}, pruned ? full.restrict(keep) : full};
  for (std::size_t k = 0; k < doc.order(); ++k) {
    const auto& m = doc.marginals[k];
    std::vector<Rational> w;
    std::vector<std::string> atoms;
    std::vector<std::vector<double>> coords;
    for (std::size_t i : keep[k]) {
      w.push_back(m.weights[i]);
      atoms.push_back(m.atoms[i]);
      if (!m.coords.empty()) coords.push_back(m.coords[i]);
    }
    if constexpr (is_exact_v<T>) {
      exact.marginals.push_back(
          DiscreteMeasure<Rational>::create(std::move(w), std::move(atoms), std::move(coords)));
    } else {
      // Floating documents may miss 1 by up to 1e-12; renormalise exactly first.
      Rational total(0);
      for (const auto& x : w) total += x;
      for (auto& x : w) x /= total;
      exact.marginals.push_back(
          DiscreteMeasure<Rational>::create(std::move(w), std::move(atoms), std::move(coords)));
    }
  }
  return convert_instance<T>(exact);
}

template Instance<Rational> make_instance(const ProblemDocument&, std::vector<std::string>&,
                                          std::size_t);
template Instance<double> make_instance(const ProblemDocument&, std::vector<std::string>&,
                                        std::size_t);

ProblemDocument document_from_instance(const Instance<Rational>& instance) {
  ProblemDocument doc;
  for (const auto& m : instance.marginals) {
    doc.marginals.push_back(MarginalSpec{m.atoms(), m.coords(), m.weights()});
  }
  doc.cost.kind = CostSpec::Kind::tensor;
  doc.cost.entries = instance.cost.data();
  return doc;
}

std::string instance_digest(const ProblemDocument& doc) {
  const std::string text = to_json(doc).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json exact_value(const Rational& x) {
  return {{"exact", to_exact_string(x)}, {"decimal", x.get_d()}};
}

json exact_value(double x) { return {{"decimal", x}}; }

}  // namespace mot
