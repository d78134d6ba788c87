#include "wpx/runconfig.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wpx {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object())
    throw config_error("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw config_error("config: unknown key \"" + it.key() + "\" in " +
                         where);
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw config_error(std::string("config: bad value for \"") + key +
                         "\"");
    }
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config: parse error: ") + e.what());
  }
  check_keys(j, {"n", "grid_size", "seed", "dictionary", "coefficients",
                 "form", "solver", "t_final", "nout", "roundtrip", "norms",
                 "diagnostics"},
             "top level");
  ExperimentConfig c;
  get(j, "n", c.n);
  get(j, "grid_size", c.grid_size);
  get(j, "seed", c.seed);
  get(j, "form", c.form);
  get(j, "t_final", c.t_final);
  get(j, "nout", c.nout);
  get(j, "roundtrip", c.roundtrip);
  if (j.contains("dictionary")) {
    const json& d = j["dictionary"];
    check_keys(d, {"mode", "c_ang", "radial_nodes"}, "dictionary");
    get(d, "mode", c.dict_mode);
    get(d, "c_ang", c.c_ang);
    get(d, "radial_nodes", c.radial_nodes);
  }
  if (j.contains("coefficients")) {
    const json& d = j["coefficients"];
    check_keys(d, {"kind", "r", "amplitude", "seed", "file"}, "coefficients");
    get(d, "kind", c.coeff_kind);
    get(d, "r", c.coeff_r);
    get(d, "amplitude", c.coeff_amplitude);
    get(d, "seed", c.coeff_seed);
    get(d, "file", c.coeff_file);
  }
  if (j.contains("solver")) {
    const json& d = j["solver"];
    check_keys(d, {"method", "K", "dt", "chi_cutoff", "shift_c", "scheme",
                   "cfl"},
               "solver");
    get(d, "method", c.solver);
    get(d, "K", c.picard_K);
    get(d, "dt", c.solver_dt);
    get(d, "chi_cutoff", c.chi_cutoff);
    get(d, "shift_c", c.shift_c);
    get(d, "scheme", c.scheme);
    get(d, "cfl", c.cfl);
  }
  if (j.contains("norms")) {
    if (!j["norms"].is_array())
      throw config_error("config: norms must be an array");
    for (const json& e : j["norms"]) {
      check_keys(e, {"p", "s"}, "norms entry");
      NormRequest r;
      get(e, "p", r.p);
      get(e, "s", r.s);
      c.norms.push_back(r);
    }
  }
  if (j.contains("diagnostics")) {
    if (!j["diagnostics"].is_array())
      throw config_error("config: diagnostics must be an array");
    for (const json& e : j["diagnostics"])
      c.diagnostics.push_back(e.get<std::string>());
  }

  if (c.n < 1 || c.n > 3) throw config_error("config: n must be 1, 2 or 3");
  if (c.grid_size < 32)
    throw config_error("config: grid_size must be at least 32");
  if (c.dict_mode != "raw" && c.dict_mode != "renormalized")
    throw config_error("config: dictionary.mode must be raw|renormalized");
  if (c.coeff_kind != "flat" && c.coeff_kind != "generated" &&
      c.coeff_kind != "file")
    throw config_error("config: coefficients.kind must be flat|generated|file");
  if (c.form != "divergence" && c.form != "standard")
    throw config_error("config: form must be divergence|standard");
  if (c.solver != "parametrix" && c.solver != "reference")
    throw config_error("config: solver.method must be parametrix|reference");
  if (c.scheme != "leapfrog" && c.scheme != "rk4")
    throw config_error("config: solver.scheme must be leapfrog|rk4");
  c.hash = fnv1a(canonical_dump(c));
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string canonical_dump(const ExperimentConfig& c) {
  json j;
  j["n"] = c.n;
  j["grid_size"] = c.grid_size;
  j["seed"] = c.seed;
  j["dictionary"] = {{"mode", c.dict_mode},
                     {"c_ang", c.c_ang},
                     {"radial_nodes", c.radial_nodes}};
  j["coefficients"] = {{"kind", c.coeff_kind},
                       {"r", c.coeff_r},
                       {"amplitude", c.coeff_amplitude},
                       {"seed", c.coeff_seed},
                       {"file", c.coeff_file}};
  j["form"] = c.form;
  j["solver"] = {{"method", c.solver}, {"K", c.picard_K},
                 {"dt", c.solver_dt}, {"chi_cutoff", c.chi_cutoff},
                 {"shift_c", c.shift_c}, {"scheme", c.scheme},
                 {"cfl", c.cfl}};
  j["t_final"] = c.t_final;
  j["nout"] = c.nout;
  j["roundtrip"] = c.roundtrip;
  json norms = json::array();
  for (const NormRequest& r : c.norms) norms.push_back({{"p", r.p}, {"s", r.s}});
  j["norms"] = norms;
  j["diagnostics"] = c.diagnostics;
  return j.dump();  // nlohmann sorts object keys: canonical
}

PacketDictionary make_dictionary(const ExperimentConfig& c) {
  DictMode mode =
      c.dict_mode == "raw" ? DictMode::raw : DictMode::renormalized;
  return build_dictionary(build_profiles(8192), c.grid_size, c.n, c.c_ang,
                          c.radial_nodes, mode);
}

std::shared_ptr<const CoefficientMatrix> make_coefficients(
    const ExperimentConfig& c) {
  if (c.coeff_kind == "flat") {
    return std::make_shared<CoefficientMatrix>(
        flat_coefficients(c.n, c.grid_size));
  }
  if (c.coeff_kind == "generated") {
    return std::make_shared<CoefficientMatrix>(gen_rough_coeffs(
        c.n, c.grid_size, c.coeff_r, c.coeff_amplitude, c.coeff_seed));
  }
  return std::make_shared<CoefficientMatrix>(load_coeffs(c.coeff_file));
}

OperatorForm parse_form(const std::string& s) {
  return s == "standard" ? OperatorForm::standard : OperatorForm::divergence;
}

}  // namespace wpx
