#pragma once

// Scene description files. A scene file is one JSON document:
//
//   {
//     "version": 1,
//     "dimension": 3,
//     "matrices":    { "<name>": [[re, im], ...] },          // dim*dim, row-major
//     "observables": { "<name>": { "matrix": "<name>", "cluster_tol": 1e-8 } },
//     "network": {                                           // optional
//       "modes": ["psi_r", ...],
//       "elements": [
//         { "type": "beam_splitter", "label": "BS1", "reflectivity": 0.5, "modes": [2, 0] },
//         { "type": "phase_shifter", "label": "phi", "phase": 0.0, "mode": 1 },
//         { "type": "mirror", "label": "M1", "mode": 1 },
//         { "type": "custom", "label": "U", "matrix": "<name>" }
//       ],
//       "input_state": { "pure": [[re, im], ...] }  |  { "mixed": "<matrix name>" },
//       "detectors":  [ { "name": "D_r", "projector": "<matrix name>" } ],
//       "projectors": [ { "name": "path_r", "projector": "<matrix name>" } ],
//       "lossy": false
//     },
//     "queries": [ { "kind": "analyze", "pair": ["A", "B"] }, ... ]
//   }
//
// Numbers are written with the shortest representation that reads back to
// the same double, so dump -> parse is exact.

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "complement_lab/hilbert.hpp"
#include "complement_lab/optics.hpp"
#include "complement_lab/spectral.hpp"

namespace complement_lab {

/// Malformed document (syntax or schema type error).
class SceneParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A name in a query or reference does not resolve.
class UnresolvedName : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ObservableSpec {
  std::string matrix;
  std::optional<double> cluster_tol;
  friend bool operator==(const ObservableSpec&, const ObservableSpec&) = default;
};

struct ElementSpec {
  std::string label;
  /// Custom unitaries are referenced by matrix name.
  std::variant<BeamSplitter, PhaseShifter, Mirror, std::string> kind;
};

struct NamedRef {
  std::string name;
  std::string matrix;
  friend bool operator==(const NamedRef&, const NamedRef&) = default;
};

struct NetworkSpec {
  std::vector<std::string> modes;
  std::vector<ElementSpec> elements;
  std::variant<std::vector<Complex>, std::string> input_state;  ///< pure amplitudes or density name
  std::vector<NamedRef> detectors;
  std::vector<NamedRef> projectors;
  bool lossy = false;
};

struct Query {
  std::string kind;  ///< analyze | simulate | duality
  nlohmann::json arguments = nlohmann::json::object();
  friend bool operator==(const Query&, const Query&) = default;
};

struct SceneFile {
  int version = 1;
  Eigen::Index dimension = 0;
  std::map<std::string, Matrix> matrices;
  std::map<std::string, ObservableSpec> observables;
  std::optional<NetworkSpec> network;
  std::vector<Query> queries;
};

namespace scene_detail {

inline bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

inline bool same_element(const ElementSpec& a, const ElementSpec& b) {
  if (a.label != b.label || a.kind.index() != b.kind.index()) {
    return false;
  }
  if (const auto* x = std::get_if<BeamSplitter>(&a.kind)) {
    const auto& y = std::get<BeamSplitter>(b.kind);
    return x->reflectivity == y.reflectivity && x->mode_a == y.mode_a && x->mode_b == y.mode_b;
  }
  if (const auto* x = std::get_if<PhaseShifter>(&a.kind)) {
    const auto& y = std::get<PhaseShifter>(b.kind);
    return x->phase == y.phase && x->mode == y.mode;
  }
  if (const auto* x = std::get_if<Mirror>(&a.kind)) {
    return x->mode == std::get<Mirror>(b.kind).mode;
  }
  return std::get<std::string>(a.kind) == std::get<std::string>(b.kind);
}

inline nlohmann::json complex_to_json(Complex z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SceneParseError(where + ": complex numbers are [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SceneParseError(where + ": missing '" + key + "'");
  }
  return obj.at(key);
}

template <typename T>
T get_as(const nlohmann::json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SceneParseError(where + ": " + e.what());
  }
}

inline std::size_t mode_index(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_unsigned()) {
    throw SceneParseError(where + ": mode must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace scene_detail

inline bool operator==(const SceneFile& a, const SceneFile& b) {
  using namespace scene_detail;
  if (a.version != b.version || a.dimension != b.dimension ||
      a.observables != b.observables || a.queries != b.queries ||
      a.matrices.size() != b.matrices.size() || a.network.has_value() != b.network.has_value()) {
    return false;
  }
  for (const auto& [name, m] : a.matrices) {
    auto it = b.matrices.find(name);
    if (it == b.matrices.end() || !same_matrix(m, it->second)) {
      return false;
    }
  }
  if (a.network) {
    const auto& x = *a.network;
    const auto& y = *b.network;
    if (x.modes != y.modes || x.detectors != y.detectors || x.projectors != y.projectors ||
        x.lossy != y.lossy || x.input_state != y.input_state ||
        x.elements.size() != y.elements.size()) {
      return false;
    }
    for (std::size_t k = 0; k < x.elements.size(); ++k) {
      if (!same_element(x.elements[k], y.elements[k])) {
        return false;
      }
    }
  }
  return true;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out.push_back(scene_detail::complex_to_json(m(r, c)));
    }
  }
  return out;
}

inline Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index dim, const std::string& where) {
  if (!j.is_array()) {
    throw SceneParseError(where + ": matrix must be a list of [re, im] pairs");
  }
  if (static_cast<Eigen::Index>(j.size()) != dim * dim) {
    throw DimensionMismatch(where + ": matrix has " + std::to_string(j.size()) +
                            " entries, dimension " + std::to_string(dim) + " needs " +
                            std::to_string(dim * dim));
  }
  Matrix m(dim, dim);
  for (Eigen::Index k = 0; k < dim * dim; ++k) {
    m(k / dim, k % dim) = scene_detail::complex_from_json(j[static_cast<std::size_t>(k)], where);
  }
  return m;
}

inline nlohmann::json to_json(const SceneFile& f) {
  using nlohmann::json;
  json out = json::object();
  out["version"] = f.version;
  out["dimension"] = f.dimension;
  json mats = json::object();
  for (const auto& [name, m] : f.matrices) {
    mats[name] = matrix_to_json(m);
  }
  out["matrices"] = mats;
  json obs = json::object();
  for (const auto& [name, spec] : f.observables) {
    json o = {{"matrix", spec.matrix}};
    if (spec.cluster_tol) {
      o["cluster_tol"] = *spec.cluster_tol;
    }
    obs[name] = o;
  }
  out["observables"] = obs;
  if (f.network) {
    const NetworkSpec& n = *f.network;
    json net = json::object();
    net["modes"] = n.modes;
    json elems = json::array();
    for (const auto& e : n.elements) {
      json je = {{"label", e.label}};
      if (const auto* bs = std::get_if<BeamSplitter>(&e.kind)) {
        je["type"] = "beam_splitter";
        je["reflectivity"] = bs->reflectivity;
        je["modes"] = json::array({bs->mode_a, bs->mode_b});
      } else if (const auto* ps = std::get_if<PhaseShifter>(&e.kind)) {
        je["type"] = "phase_shifter";
        je["phase"] = ps->phase;
        je["mode"] = ps->mode;
      } else if (const auto* mi = std::get_if<Mirror>(&e.kind)) {
        je["type"] = "mirror";
        je["mode"] = mi->mode;
      } else {
        je["type"] = "custom";
        je["matrix"] = std::get<std::string>(e.kind);
      }
      elems.push_back(je);
    }
    net["elements"] = elems;
    if (const auto* amps = std::get_if<std::vector<Complex>>(&n.input_state)) {
      json a = json::array();
      for (Complex z : *amps) {
        a.push_back(scene_detail::complex_to_json(z));
      }
      net["input_state"] = {{"pure", a}};
    } else {
      net["input_state"] = {{"mixed", std::get<std::string>(n.input_state)}};
    }
    auto refs = [](const std::vector<NamedRef>& v) {
      json a = json::array();
      for (const auto& r : v) {
        a.push_back({{"name", r.name}, {"projector", r.matrix}});
      }
      return a;
    };
    net["detectors"] = refs(n.detectors);
    net["projectors"] = refs(n.projectors);
    net["lossy"] = n.lossy;
    out["network"] = net;
  }
  json qs = json::array();
  for (const auto& q : f.queries) {
    json jq = q.arguments;
    jq["kind"] = q.kind;
    qs.push_back(jq);
  }
  out["queries"] = qs;
  return out;
}

/// Builds a SceneFile from parsed JSON. Schema/type problems raise
/// SceneParseError; size mismatches raise DimensionMismatch.
inline SceneFile scene_from_json(const nlohmann::json& j) {
  using namespace scene_detail;
  if (!j.is_object()) {
    throw SceneParseError("scene file must be a JSON object");
  }
  SceneFile f;
  f.version = get_as<int>(require(j, "version", "scene"), "version");
  if (f.version != 1) {
    throw SceneParseError("unsupported scene file version " + std::to_string(f.version));
  }
  const auto& dim_json = require(j, "dimension", "scene");
  if (!dim_json.is_number_integer() || dim_json.get<long long>() < 1) {
    throw SceneParseError("dimension must be a positive integer");
  }
  f.dimension = static_cast<Eigen::Index>(dim_json.get<long long>());

  if (j.contains("matrices")) {
    const auto& mats = j.at("matrices");
    if (!mats.is_object()) {
      throw SceneParseError("'matrices' must be an object");
    }
    for (const auto& [name, value] : mats.items()) {
      f.matrices.emplace(name, matrix_from_json(value, f.dimension, "matrix '" + name + "'"));
    }
  }
  if (j.contains("observables")) {
    const auto& obs = j.at("observables");
    if (!obs.is_object()) {
      throw SceneParseError("'observables' must be an object");
    }
    for (const auto& [name, value] : obs.items()) {
      const std::string where = "observable '" + name + "'";
      ObservableSpec spec;
      spec.matrix = get_as<std::string>(require(value, "matrix", where), where);
      if (value.contains("cluster_tol")) {
        spec.cluster_tol = get_as<double>(value.at("cluster_tol"), where + " cluster_tol");
      }
      f.observables.emplace(name, std::move(spec));
    }
  }
  if (j.contains("network")) {
    const auto& net = j.at("network");
    NetworkSpec n;
    n.modes = get_as<std::vector<std::string>>(require(net, "modes", "network"), "network modes");
    const auto& elems = require(net, "elements", "network");
    if (!elems.is_array()) {
      throw SceneParseError("network elements must be a list");
    }
    for (std::size_t k = 0; k < elems.size(); ++k) {
      const auto& je = elems[k];
      const std::string where = "element " + std::to_string(k);
      ElementSpec e;
      e.label = je.contains("label") ? get_as<std::string>(je.at("label"), where) : "";
      const auto type = get_as<std::string>(require(je, "type", where), where);
      if (type == "beam_splitter") {
        const auto& modes = require(je, "modes", where);
        if (!modes.is_array() || modes.size() != 2) {
          throw SceneParseError(where + ": beam splitter needs two modes");
        }
        e.kind = BeamSplitter{get_as<double>(require(je, "reflectivity", where), where),
                              mode_index(modes[0], where), mode_index(modes[1], where)};
      } else if (type == "phase_shifter") {
        e.kind = PhaseShifter{get_as<double>(require(je, "phase", where), where),
                              mode_index(require(je, "mode", where), where)};
      } else if (type == "mirror") {
        e.kind = Mirror{mode_index(require(je, "mode", where), where)};
      } else if (type == "custom") {
        e.kind = get_as<std::string>(require(je, "matrix", where), where);
      } else {
        throw SceneParseError(where + ": unknown element type '" + type + "'");
      }
      n.elements.push_back(std::move(e));
    }
    const auto& state = require(net, "input_state", "network");
    if (state.contains("pure")) {
      const auto& amps = state.at("pure");
      if (!amps.is_array()) {
        throw SceneParseError("input_state.pure must be a list of [re, im]");
      }
      std::vector<Complex> v;
      for (const auto& a : amps) {
        v.push_back(complex_from_json(a, "input_state"));
      }
      n.input_state = std::move(v);
    } else if (state.contains("mixed")) {
      n.input_state = get_as<std::string>(state.at("mixed"), "input_state.mixed");
    } else {
      throw SceneParseError("input_state needs 'pure' or 'mixed'");
    }
    auto refs = [](const nlohmann::json& a, const std::string& where) {
      std::vector<NamedRef> out;
      if (!a.is_array()) {
        throw SceneParseError(where + " must be a list");
      }
      for (const auto& r : a) {
        out.push_back({get_as<std::string>(require(r, "name", where), where),
                       get_as<std::string>(require(r, "projector", where), where)});
      }
      return out;
    };
    if (net.contains("detectors")) {
      n.detectors = refs(net.at("detectors"), "detectors");
    }
    if (net.contains("projectors")) {
      n.projectors = refs(net.at("projectors"), "projectors");
    }
    n.lossy = net.contains("lossy") ? get_as<bool>(net.at("lossy"), "lossy") : false;
    f.network = std::move(n);
  }
  if (j.contains("queries")) {
    const auto& qs = j.at("queries");
    if (!qs.is_array()) {
      throw SceneParseError("'queries' must be a list");
    }
    for (const auto& jq : qs) {
      Query q;
      q.kind = get_as<std::string>(require(jq, "kind", "query"), "query kind");
      if (q.kind != "analyze" && q.kind != "simulate" && q.kind != "duality") {
        throw SceneParseError("unknown query kind '" + q.kind + "'");
      }
      q.arguments = jq;
      q.arguments.erase("kind");
      f.queries.push_back(std::move(q));
    }
  }
  return f;
}

inline SceneFile parse_scene(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SceneParseError(std::string("malformed JSON: ") + e.what());
  }
  return scene_from_json(j);
}

inline SceneFile load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open scene file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scene(buffer.str());
}

inline std::string dump_scene(const SceneFile& f) {
  return to_json(f).dump(2) + "\n";
}

inline const Matrix& resolve_matrix(const SceneFile& f, const std::string& name) {
  auto it = f.matrices.find(name);
  if (it == f.matrices.end()) {
    throw UnresolvedName("unknown matrix '" + name + "'");
  }
  return it->second;
}

/// Observable by name: declared observables first, then raw matrices.
inline Observable resolve_observable(const SceneFile& f, const std::string& name,
                                     const Tolerances& tol = {}) {
  if (auto it = f.observables.find(name); it != f.observables.end()) {
    return decompose(resolve_matrix(f, it->second.matrix), it->second.cluster_tol, tol);
  }
  if (auto it = f.matrices.find(name); it != f.matrices.end()) {
    return decompose(it->second, std::nullopt, tol);
  }
  throw UnresolvedName("unknown observable '" + name + "'");
}

/// Instantiates the optical network. Throws UnresolvedName when the file
/// has no network or a reference does not resolve.
inline OpticalScene resolve_scene(const SceneFile& f, const Tolerances& tol = {}) {
  if (!f.network) {
    throw UnresolvedName("scene file has no optical network");
  }
  const NetworkSpec& n = *f.network;
  require_same_dimension("network modes", f.dimension, static_cast<Eigen::Index>(n.modes.size()));
  auto projector = [&](const NamedRef& r) {
    return NamedProjector{r.name, Projector::from_matrix(resolve_matrix(f, r.matrix), tol)};
  };
  std::vector<Element> elements;
  for (const auto& e : n.elements) {
    if (const auto* name = std::get_if<std::string>(&e.kind)) {
      elements.push_back({e.label, CustomUnitary{resolve_matrix(f, *name)}});
    } else {
      std::visit(
          [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (!std::is_same_v<K, std::string>) {
              elements.push_back({e.label, k});
            }
          },
          e.kind);
    }
  }
  std::optional<QuantumState> state;
  if (const auto* amps = std::get_if<std::vector<Complex>>(&n.input_state)) {
    Vector psi(static_cast<Eigen::Index>(amps->size()));
    for (std::size_t k = 0; k < amps->size(); ++k) {
      psi(static_cast<Eigen::Index>(k)) = (*amps)[k];
    }
    require_same_dimension("input state", f.dimension, psi.size());
    state = QuantumState::pure(std::move(psi), tol);
  } else {
    state = QuantumState::mixed(resolve_matrix(f, std::get<std::string>(n.input_state)), tol);
  }
  OpticalScene scene{n.modes, std::move(elements), std::move(*state), {}, {}, n.lossy};
  for (const auto& r : n.projectors) {
    scene.named_projectors.push_back(projector(r));
  }
  for (const auto& r : n.detectors) {
    scene.detectors.push_back(projector(r));
  }
  validate(scene, tol);
  return scene;
}

/// Serializable form of an in-memory optical scene. Projector and detector
/// matrices are stored under their own names; custom unitaries as "U_<label>".
inline SceneFile scene_file_from(const OpticalScene& scene) {
  SceneFile f;
  f.dimension = static_cast<Eigen::Index>(scene.dim());
  NetworkSpec n;
  n.modes = scene.mode_labels;
  for (const auto& e : scene.elements) {
    if (const auto* cu = std::get_if<CustomUnitary>(&e.kind)) {
      const std::string name = "U_" + e.label;
      f.matrices[name] = cu->matrix;
      n.elements.push_back({e.label, name});
    } else {
      std::visit(
          [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (!std::is_same_v<K, CustomUnitary>) {
              n.elements.push_back({e.label, k});
            }
          },
          e.kind);
    }
  }
  if (scene.input_state.is_pure()) {
    const Vector& psi = scene.input_state.vector();
    n.input_state = std::vector<Complex>(psi.data(), psi.data() + psi.size());
  } else {
    f.matrices["rho_in"] = scene.input_state.density_matrix();
    n.input_state = std::string("rho_in");
  }
  for (const auto& p : scene.named_projectors) {
    f.matrices[p.name] = p.projector.matrix();
    n.projectors.push_back({p.name, p.name});
  }
  for (const auto& d : scene.detectors) {
    f.matrices[d.name] = d.projector.matrix();
    n.detectors.push_back({d.name, d.name});
  }
  n.lossy = scene.lossy;
  f.network = std::move(n);
  return f;
}

namespace builtin {

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> all = {"rangwala-roy", "biprism", "qubit-zx",
                                               "double-slit"};
  return all;
}

inline SceneFile rangwala_roy(double phi = 0.0) {
  SceneFile f = scene_file_from(build_rangwala_roy(phi));
  f.matrices["path"] = rangwala_roy_path_observable().matrix();
  f.matrices["interference"] = rangwala_roy_interference_observable().matrix();
  f.observables["path"] = {"path", std::nullopt};
  f.observables["interference"] = {"interference", std::nullopt};
  return f;
}

struct BiprismParams {
  std::size_t dim_r = 4;
  std::size_t dim_t = 4;
  std::size_t wave_rank = 2;
  double alpha2 = 0.5;
};

inline BiprismScene biprism_scene(const BiprismParams& p, const Tolerances& tol = {}) {
  if (!(p.alpha2 >= 0.0 && p.alpha2 <= 1.0)) {
    throw InvariantViolation("alpha2 must lie in [0, 1]");
  }
  return build_biprism(p.dim_r, p.dim_t, p.wave_rank, std::sqrt(p.alpha2),
                       std::sqrt(1.0 - p.alpha2), tol);
}

/// Observables: "path" (0 on H_r, 1 on H_t) and "wave" (1 on P_wave, 0 else).
inline SceneFile biprism(const BiprismParams& p = {}) {
  const BiprismScene b = biprism_scene(p);
  SceneFile f = scene_file_from(biprism_optical_scene(b));
  f.matrices["path"] = b.p_t.matrix();
  f.matrices["wave"] = b.p_wave.matrix();
  f.observables["path"] = {"path", std::nullopt};
  f.observables["wave"] = {"wave", std::nullopt};
  return f;
}

/// Qubit observables Z = diag(1, -1) and X = [[0, 1], [1, 0]].
inline SceneFile qubit_zx() {
  SceneFile f;
  f.dimension = 2;
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  f.matrices["Z"] = z;
  f.matrices["X"] = x;
  f.observables["Z"] = {"Z", std::nullopt};
  f.observables["X"] = {"X", std::nullopt};
  return f;
}

/// Two-path scene in two dimensions: equal superposition over two slits, a
/// phase "phi" on slit b, and a 50:50 recombination whose outputs are the
/// bright and dark fringe detectors.
inline SceneFile double_slit(double phi = 0.0) {
  const double h = std::numbers::sqrt2 / 2.0;
  const Vector a = basis_vector(2, 0);
  const Vector b = basis_vector(2, 1);
  OpticalScene scene{
      .mode_labels = {"slit_a", "slit_b"},
      .elements = {{"phi", PhaseShifter{phi, 1}}, {"screen", BeamSplitter{0.5, 0, 1}}},
      .input_state = QuantumState::pure(h * (a + b)),
      .named_projectors = {{"path_a", Projector::from_matrix(a * a.adjoint())},
                           {"path_b", Projector::from_matrix(b * b.adjoint())}},
      .detectors = {{"D_a", Projector::from_matrix(a * a.adjoint())},
                    {"D_b", Projector::from_matrix(b * b.adjoint())}},
      .lossy = false,
  };
  SceneFile f = scene_file_from(scene);
  const Projector plus = projector_from_span({Vector(h * (a + b))});
  const Projector minus = projector_from_span({Vector(h * (a - b))});
  f.matrices["path"] = b * b.adjoint();
  f.matrices["interference"] = plus.matrix() - minus.matrix();
  f.observables["path"] = {"path", std::nullopt};
  f.observables["interference"] = {"interference", std::nullopt};
  return f;
}

inline SceneFile by_name(const std::string& name) {
  if (name == "rangwala-roy") {
    return rangwala_roy();
  }
  if (name == "biprism") {
    return biprism();
  }
  if (name == "qubit-zx") {
    return qubit_zx();
  }
  if (name == "double-slit") {
    return double_slit();
  }
  throw UnresolvedName("unknown builtin '" + name + "'");
}

}  // namespace builtin

}  // namespace complement_lab
