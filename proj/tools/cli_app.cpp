#include "cli_app.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "complement_lab/complement_lab.hpp"

namespace complement_lab::cli {
namespace {

using nlohmann::json;

std::string shortest(double v) {
  if (v == 0.0) {
    v = 0.0;  // drop the sign of -0
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  return s == "-0.000000" ? "0.000000" : s;
}

std::string complex_text(Complex z) {
  std::ostringstream os;
  os << fixed6(z.real()) << (z.imag() < 0 ? "-" : "+") << fixed6(std::abs(z.imag())) << "i";
  return os.str();
}

std::string vector_text(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    s += (k ? ", " : "") + complex_text(v(k));
  }
  return s + ")";
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    a.push_back(json::array({v(k).real(), v(k).imag()}));
  }
  return a;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') {
    ++first;
  }
  auto res = std::from_chars(first, last, v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
    throw std::invalid_argument("malformed " + what + " '" + s + "'");
  }
  return v;
}

struct Source {
  std::string builtin;
  std::string file;
};

SceneFile load_source(const Source& src) {
  if (!src.builtin.empty() && !src.file.empty()) {
    throw std::invalid_argument("give either --builtin or --file, not both");
  }
  if (!src.builtin.empty()) {
    return builtin::by_name(src.builtin);
  }
  if (!src.file.empty()) {
    return load_scene(src.file);
  }
  throw std::invalid_argument("an input is required: --builtin <name> or --file <path>");
}

void write_dump(const SceneFile& f, const std::string& path) {
  if (path.empty()) {
    return;
  }
  std::ofstream os(path);
  if (!os) {
    throw std::invalid_argument("cannot write dump file '" + path + "'");
  }
  os << dump_scene(f);
}

// ---------------------------------------------------------------- analyze

struct PairReport {
  std::string name_a;
  std::string name_b;
  Verdict verdict;
  Relation probabilistic;
};

PairReport analyze_pair(const SceneFile& f, const std::string& a, const std::string& b,
                        const Tolerances& tol) {
  const Observable oa = resolve_observable(f, a, tol);
  const Observable ob = resolve_observable(f, b, tol);
  require_same_dimension("observable pair " + a + "," + b, oa.dim(), ob.dim());
  PairReport r{a, b, classify(oa, ob, tol), Relation::Noncomplementary};
  r.probabilistic = probabilistic_check(oa, ob, tol).relation;
  return r;
}

std::size_t common_count(const Verdict& v) {
  std::size_t n = 0;
  for (const auto& w : v.witnesses) {
    n += w.kind == WitnessKind::CommonEigenvector ? 1 : 0;
  }
  return n;
}

json witness_json(const WitnessRecord& w) {
  json j = {{"kind", to_string(w.kind)},
            {"value_set_a", w.value_set_a.to_string(true)},
            {"value_set_b", w.value_set_b.to_string(true)},
            {"magnitude", w.magnitude}};
  if (const auto* p = std::get_if<Projector>(&w.evidence)) {
    json basis = json::array();
    for (Eigen::Index k = 0; k < p->rank(); ++k) {
      basis.push_back(vector_json(p->basis().col(k)));
    }
    j["evidence"] = {{"type", "projector"}, {"rank", p->rank()}, {"basis", basis}};
  } else {
    j["evidence"] = {{"type", "vector"}, {"vector", vector_json(std::get<Vector>(w.evidence))}};
  }
  return j;
}

void print_analyze(const std::vector<PairReport>& reports, const std::string& format,
                   std::ostream& out) {
  if (format == "csv") {
    out << "observable_a,observable_b,relation,commutation,commutator_max_norm,pairs_total,"
           "pairs_zero_meet,pairs_nonzero_meet,probabilistic_relation,conditions_agree,"
           "common_eigenspaces\n";
    for (const auto& r : reports) {
      const auto& v = r.verdict;
      out << r.name_a << ',' << r.name_b << ',' << to_string(v.relation) << ','
          << to_string(v.commutation) << ',' << shortest(v.commutator_norm) << ','
          << v.counts.total << ',' << v.counts.zero_meet << ',' << v.counts.nonzero_meet << ','
          << to_string(r.probabilistic) << ','
          << (r.probabilistic == v.relation ? "true" : "false") << ',' << common_count(v)
          << '\n';
    }
    return;
  }
  if (format == "json") {
    json all = json::array();
    for (const auto& r : reports) {
      const auto& v = r.verdict;
      json witnesses = json::array();
      for (const auto& w : v.witnesses) {
        witnesses.push_back(witness_json(w));
      }
      all.push_back({{"observable_a", r.name_a},
                     {"observable_b", r.name_b},
                     {"relation", to_string(v.relation)},
                     {"commutation", to_string(v.commutation)},
                     {"commutator_max_norm", v.commutator_norm},
                     {"pairs",
                      {{"total", v.counts.total},
                       {"zero_meet", v.counts.zero_meet},
                       {"nonzero_meet", v.counts.nonzero_meet}}},
                     {"probabilistic_relation", to_string(r.probabilistic)},
                     {"conditions_agree", r.probabilistic == v.relation},
                     {"notes", v.notes},
                     {"witnesses", witnesses}});
    }
    out << json{{"analyses", all}}.dump(2) << '\n';
    return;
  }
  bool first = true;
  for (const auto& r : reports) {
    const auto& v = r.verdict;
    if (!first) {
      out << '\n';
    }
    first = false;
    out << "pair " << r.name_a << " vs " << r.name_b << ": " << to_string(v.relation) << ", "
        << to_string(v.commutation) << '\n';
    char norm[32];
    std::snprintf(norm, sizeof norm, "%.3e", v.commutator_norm);
    out << "  commutator max-norm   " << norm << '\n';
    out << "  spectral subset pairs total " << v.counts.total << ", zero meet "
        << v.counts.zero_meet << ", nonzero meet " << v.counts.nonzero_meet << '\n';
    out << "  probabilistic check   " << to_string(r.probabilistic)
        << (r.probabilistic == v.relation ? " (agrees)" : " (DISAGREES)") << '\n';
    for (const auto& note : v.notes) {
      out << "  note: " << note << '\n';
    }
    for (const auto& w : v.witnesses) {
      out << "  witness " << to_string(w.kind) << "  X=" << w.value_set_a.to_string()
          << "  Y=" << w.value_set_b.to_string() << "  magnitude " << fixed6(w.magnitude)
          << '\n';
      if (const auto* p = std::get_if<Projector>(&w.evidence)) {
        out << "    evidence projector rank " << p->rank() << '\n';
        for (Eigen::Index k = 0; k < p->rank(); ++k) {
          out << "      " << vector_text(p->basis().col(k)) << '\n';
        }
      } else {
        out << "    evidence vector " << vector_text(std::get<Vector>(w.evidence)) << '\n';
      }
    }
  }
}

std::pair<std::string, std::string> parse_pair(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
    throw std::invalid_argument("--pair expects two names 'A,B', got '" + s + "'");
  }
  return {parts[0], parts[1]};
}

// ---------------------------------------------------------------- simulate

std::string column_name(const std::string& detector) {
  std::string s = "p_";
  for (char c : detector) {
    if (c != '_') {
      s += c;
    }
  }
  return s;
}

struct SimulateOptions {
  Source source;
  std::string phi;
  std::string alpha2;
  std::string biprism_dims;
  std::string coincidence;
  std::string format = "table";
  std::string dump;
};

builtin::BiprismParams parse_biprism_dims(const std::string& spec, builtin::BiprismParams p) {
  if (spec.empty()) {
    return p;
  }
  const auto parts = split(spec, ',');
  if (parts.size() != 3) {
    throw std::invalid_argument("--biprism expects dim_r,dim_t,wave_rank");
  }
  std::size_t v[3];
  for (int k = 0; k < 3; ++k) {
    auto res = std::from_chars(parts[k].data(), parts[k].data() + parts[k].size(), v[k]);
    if (parts[k].empty() || res.ec != std::errc{} || res.ptr != parts[k].data() + parts[k].size()) {
      throw std::invalid_argument("--biprism expects three positive integers");
    }
  }
  p.dim_r = v[0];
  p.dim_t = v[1];
  p.wave_rank = v[2];
  return p;
}

int cmd_simulate(const SimulateOptions& o, const Tolerances& tol, std::ostream& out) {
  SceneFile file;
  const bool is_biprism = o.source.builtin == "biprism";
  if (is_biprism) {
    builtin::BiprismParams p = parse_biprism_dims(o.biprism_dims, {});
    if (!o.alpha2.empty()) {
      p.alpha2 = parse_double(o.alpha2, "--alpha2");
    }
    file = builtin::biprism(p);
    if (!o.source.file.empty()) {
      throw std::invalid_argument("give either --builtin or --file, not both");
    }
  } else {
    if (!o.alpha2.empty() || !o.biprism_dims.empty()) {
      throw std::invalid_argument("--alpha2 and --biprism apply to the biprism builtin only");
    }
    file = load_source(o.source);
  }
  write_dump(file, o.dump);
  OpticalScene scene = resolve_scene(file, tol);
  if (scene.detectors.empty()) {
    throw UnresolvedName("scene has no detectors");
  }

  std::vector<double> phis;
  if (!o.phi.empty()) {
    phis = parse_grid(o.phi);
    if (set_phase(scene, "phi", 0.0) == 0) {
      throw UnresolvedName("--phi given but the scene has no phase shifter labelled 'phi'");
    }
  }

  std::vector<std::pair<std::string, std::string>> pairs;
  if (!o.coincidence.empty()) {
    pairs.push_back(parse_pair(o.coincidence));
    (void)scene.detector(pairs.back().first);
    (void)scene.detector(pairs.back().second);
  } else {
    for (std::size_t i = 0; i < scene.detectors.size(); ++i) {
      for (std::size_t j = i + 1; j < scene.detectors.size(); ++j) {
        pairs.emplace_back(scene.detectors[i].name, scene.detectors[j].name);
      }
    }
  }

  std::vector<std::string> header;
  if (!phis.empty()) {
    header.push_back("phi");
  }
  for (const auto& d : scene.detectors) {
    header.push_back(column_name(d.name));
  }
  if (scene.lossy) {
    header.push_back("p_loss");
  }
  header.push_back("anticoincidence");

  std::vector<std::vector<double>> rows;
  auto evaluate = [&](std::optional<double> phi) {
    if (phi) {
      set_phase(scene, "phi", *phi);
    }
    std::vector<double> row;
    if (phi) {
      row.push_back(*phi);
    }
    for (const auto& [name, p] : detection_probabilities(scene, tol)) {
      row.push_back(p);
    }
    double joint = 0.0;
    for (const auto& [a, b] : pairs) {
      joint = std::max(joint, anticoincidence(scene, a, b, tol));
    }
    row.push_back(joint);
    rows.push_back(std::move(row));
  };
  if (phis.empty()) {
    evaluate(std::nullopt);
  } else {
    for (double phi : phis) {
      evaluate(phi);
    }
  }

  const bool csv = o.format == "csv";
  for (std::size_t k = 0; k < header.size(); ++k) {
    out << (k ? (csv ? "," : " ") : "") << (csv ? header[k] : std::string(12 - std::min<std::size_t>(12, header[k].size()), ' ') + header[k]);
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (csv) {
        out << (k ? "," : "") << shortest(row[k]);
      } else {
        const std::string s = fixed6(row[k]);
        out << (k ? " " : "") << std::string(12 - std::min<std::size_t>(12, s.size()), ' ') << s;
      }
    }
    out << '\n';
  }
  return exit_ok;
}

// ---------------------------------------------------------------- duality

struct DualityOptions {
  std::string alpha2;
  std::string mu = "1";
  std::string biprism_dims;
  bool outside_wave = false;
  std::string format = "table";
};

int cmd_duality(const DualityOptions& o, const Tolerances& tol, std::ostream& out) {
  if (o.alpha2.empty()) {
    throw std::invalid_argument("--alpha2 grid is required");
  }
  const std::vector<double> alphas = parse_grid(o.alpha2);
  const std::vector<double> mus = parse_grid(o.mu);
  for (double a : alphas) {
    if (a < 0.0 || a > 1.0) {
      throw std::invalid_argument("--alpha2 values must lie in [0, 1]");
    }
  }
  for (double m : mus) {
    if (m < 0.0 || m > 1.0) {
      throw std::invalid_argument("--mu values must lie in [0, 1]");
    }
  }
  const bool biprism_mode = !o.biprism_dims.empty();
  if (o.outside_wave && !biprism_mode) {
    throw std::invalid_argument("--outside-wave needs --biprism");
  }

  std::vector<DualityReport> reports;
  for (double a2 : alphas) {
    if (biprism_mode) {
      builtin::BiprismParams p = parse_biprism_dims(o.biprism_dims, {});
      p.alpha2 = a2;
      const BiprismScene scene = builtin::biprism_scene(p, tol);
      std::optional<QuantumState> state;
      if (o.outside_wave) {
        state = biprism_state_outside_wave(scene, scene.alpha, scene.beta, tol);
      }
      reports.push_back(normalization_vs_duality(scene, state, tol));
    } else {
      for (double mu : mus) {
        reports.push_back(duality_measures(TwoPathState::from_alpha2(a2, mu), tol));
        // Echo the requested grid value, not |sqrt(a2)|^2.
        reports.back().alpha2 = a2;
      }
    }
  }

  const std::vector<std::string> header = {"alpha2", "mu", "P", "V", "P2plusV2",
                                           "normalization", "wave_exp", "transmit_exp"};
  std::size_t violations = 0;
  const bool csv = o.format == "csv";
  if (!csv) {
    out << "# P = ||alpha|^2 - |beta|^2| (which-path predictability), "
           "V = 2 mu |alpha||beta| (fringe visibility)\n";
    if (biprism_mode) {
      out << "# biprism: normalization = <P_r> + <P_t>; it is a normalization, not a "
             "complementarity relation (P_wave <= P_t)\n";
    }
  }
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (csv) {
      out << (k ? "," : "") << header[k];
    } else {
      out << (k ? " " : "") << std::setw(13) << header[k];
    }
  }
  out << (csv ? "" : "  flag") << '\n';
  for (const auto& r : reports) {
    const double row[] = {r.alpha2,         r.coherence,     r.predictability,
                          r.visibility,     r.sum_of_squares, r.normalization,
                          r.wave_expectation, r.transmit_expectation};
    const bool bad = r.sum_of_squares > 1.0 + 1e-10;
    violations += bad ? 1 : 0;
    for (std::size_t k = 0; k < std::size(row); ++k) {
      if (csv) {
        out << (k ? "," : "") << shortest(row[k]);
      } else {
        out << (k ? " " : "") << std::setw(13) << fixed6(row[k]);
      }
    }
    if (!csv) {
      out << (bad ? "  VIOLATION" : "");
    }
    out << '\n';
  }
  if (!csv) {
    out << "# rows: " << reports.size() << ", P^2+V^2 > 1 violations: " << violations << '\n';
  }
  return exit_ok;
}

// ---------------------------------------------------------------- run

int cmd_run(const std::string& path, const std::string& format, const Tolerances& tol,
            std::ostream& out) {
  const SceneFile f = load_scene(path);
  if (f.queries.empty()) {
    throw std::invalid_argument("scene file has no queries");
  }
  for (std::size_t k = 0; k < f.queries.size(); ++k) {
    const Query& q = f.queries[k];
    out << "== query " << k << ": " << q.kind << '\n';
    auto arg = [&](const char* key) -> std::string {
      if (!q.arguments.contains(key)) {
        return {};
      }
      const auto& v = q.arguments.at(key);
      if (v.is_string()) {
        return v.get<std::string>();
      }
      if (v.is_number()) {
        return shortest(v.get<double>());
      }
      throw SceneParseError(std::string("query argument '") + key + "' must be a string or number");
    };
    if (q.kind == "analyze") {
      if (!q.arguments.contains("pair") || !q.arguments.at("pair").is_array() ||
          q.arguments.at("pair").size() != 2) {
        throw SceneParseError("analyze query needs \"pair\": [A, B]");
      }
      const auto& p = q.arguments.at("pair");
      if (!p[0].is_string() || !p[1].is_string()) {
        throw SceneParseError("analyze pair entries must be strings");
      }
      print_analyze({analyze_pair(f, p[0].get<std::string>(), p[1].get<std::string>(), tol)},
                    format, out);
    } else if (q.kind == "simulate") {
      SimulateOptions o;
      o.source.file = path;
      o.phi = arg("phi");
      o.coincidence = arg("coincidence");
      o.format = format;
      cmd_simulate(o, tol, out);
    } else {
      DualityOptions o;
      o.alpha2 = arg("alpha2");
      if (const std::string mu = arg("mu"); !mu.empty()) {
        o.mu = mu;
      }
      o.format = format;
      cmd_duality(o, tol, out);
    }
  }
  return exit_ok;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.empty()) {
    throw std::invalid_argument("empty grid spec");
  }
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) {
      throw std::invalid_argument("grid spec must be start:stop:count, got '" + spec + "'");
    }
    const double lo = parse_double(parts[0], "grid start");
    const double hi = parse_double(parts[1], "grid stop");
    std::size_t n = 0;
    auto res = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
    if (parts[2].empty() || res.ec != std::errc{} ||
        res.ptr != parts[2].data() + parts[2].size() || n < 1) {
      throw std::invalid_argument("grid count must be a positive integer, got '" + parts[2] + "'");
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      out.push_back(n == 1 ? lo
                           : (k + 1 == n ? hi
                                         : lo + (hi - lo) * static_cast<double>(k) /
                                                    static_cast<double>(n - 1)));
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& part : split(spec, ',')) {
    out.push_back(parse_double(part, "grid value"));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complementarity verdicts, single-photon optics and path/visibility duality"};
  app.name(args.empty() ? "complement-lab" : args.front());
  app.require_subcommand(1);

  Source analyze_src;
  std::vector<std::string> analyze_pairs;
  std::string analyze_format = "table";
  std::string analyze_dump;
  auto* analyze = app.add_subcommand("analyze", "Classify observable pairs");
  analyze->add_option("--builtin", analyze_src.builtin, "Builtin scene")
      ->check(CLI::IsMember(builtin::names()));
  analyze->add_option("--file", analyze_src.file, "Scene file");
  analyze->add_option("--pair", analyze_pairs, "Observable names A,B (repeatable)")->required();
  analyze->add_option("--format", analyze_format, "table|csv|json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  analyze->add_option("--dump", analyze_dump, "Write the loaded scene file here");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Detector probabilities over a phase sweep");
  simulate->add_option("--builtin", sim.source.builtin, "Builtin scene")
      ->check(CLI::IsMember(builtin::names()));
  simulate->add_option("--file", sim.source.file, "Scene file");
  simulate->add_option("--phi", sim.phi, "Phase grid start:stop:count for the 'phi' shifter");
  simulate->add_option("--alpha2", sim.alpha2, "Biprism reflected weight |alpha|^2");
  simulate->add_option("--biprism", sim.biprism_dims, "Biprism dim_r,dim_t,wave_rank");
  simulate->add_option("--coincidence", sim.coincidence,
                       "Detector pair D1,D2 for the anticoincidence column "
                       "(default: max over all pairs)");
  simulate->add_option("--format", sim.format, "table|csv")
      ->check(CLI::IsMember({"table", "csv"}));
  simulate->add_option("--dump", sim.dump, "Write the loaded scene file here");

  DualityOptions dual;
  auto* duality = app.add_subcommand("duality", "Predictability/visibility grid");
  duality->add_option("--alpha2", dual.alpha2, "Grid of |alpha|^2 values")->required();
  duality->add_option("--mu", dual.mu, "Grid of coherence values")->capture_default_str();
  duality->add_option("--biprism", dual.biprism_dims,
                      "Report on a biprism dim_r,dim_t,wave_rank instead of a two-path state");
  duality->add_flag("--outside-wave", dual.outside_wave,
                    "Biprism: put the transmitted amplitude in P_t - P_wave");
  duality->add_option("--format", dual.format, "table|csv")
      ->check(CLI::IsMember({"table", "csv"}));

  std::string run_file;
  std::string run_format = "table";
  auto* run_cmd = app.add_subcommand("run", "Execute the queries stored in a scene file");
  run_cmd->add_option("file", run_file, "Scene file")->required();
  run_cmd->add_option("--format", run_format, "table|csv|json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_input_error;
  }

  try {
    const Tolerances tol = tolerances_from_environment();
    if (*analyze) {
      const SceneFile f = load_source(analyze_src);
      write_dump(f, analyze_dump);
      std::vector<PairReport> reports;
      for (const auto& p : analyze_pairs) {
        const auto [a, b] = parse_pair(p);
        reports.push_back(analyze_pair(f, a, b, tol));
      }
      print_analyze(reports, analyze_format, out);
      return exit_ok;
    }
    if (*simulate) {
      return cmd_simulate(sim, tol, out);
    }
    if (*duality) {
      return cmd_duality(dual, tol, out);
    }
    return cmd_run(run_file, run_format, tol, out);
  } catch (const SceneParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_parse_error;
  } catch (const std::invalid_argument& e) {
    // DimensionMismatch, InvariantViolation, UnresolvedName and bad flags.
    err << "input error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const std::out_of_range& e) {
    err << "input error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const std::length_error& e) {
    err << "input error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_internal;
  }
}

}  // namespace complement_lab::cli
