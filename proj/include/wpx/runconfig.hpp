#pragma once
// Experiment configuration: JSON document -> validated struct, canonical
// re-serialization, FNV-1a hash (recorded in every output), and builders
// for the dictionary / coefficients / operator it describes.
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wpx/packets.hpp"
#include "wpx/symbols.hpp"

namespace wpx {

struct NormRequest {
  double p = 2, s = 0;
};

struct ExperimentConfig {
  int n = 2;
  int grid_size = 128;
  std::uint64_t seed = 1;

  // dictionary
  std::string dict_mode = "renormalized";  // or "raw"
  double c_ang = 4.0;
  int radial_nodes = 3;

  // coefficients: flat | generated | file
  std::string coeff_kind = "flat";
  double coeff_r = 2.0;
  double coeff_amplitude = 0.2;
  std::uint64_t coeff_seed = 1;
  std::string coeff_file;

  std::string form = "divergence";  // or "standard"

  // solver
  std::string solver = "parametrix";  // or "reference"
  int picard_K = 8;
  double solver_dt = 1.0 / 64;
  double chi_cutoff = 8.0;
  double shift_c = -1.0;
  std::string scheme = "leapfrog";  // reference: leapfrog | rk4
  double cfl = 0.25;

  double t_final = 0.5;
  int nout = -1;  // output times; < 0 means round(t_final / solver_dt)

  bool roundtrip = true;                 // transform: synthesize back
  std::vector<NormRequest> norms;        // norm command
  std::vector<std::string> diagnostics;  // diagnose command

  std::uint64_t hash = 0;  // FNV-1a of the canonical dump
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
std::string canonical_dump(const ExperimentConfig& c);

PacketDictionary make_dictionary(const ExperimentConfig& c);
std::shared_ptr<const CoefficientMatrix> make_coefficients(
    const ExperimentConfig& c);
OperatorForm parse_form(const std::string& s);

}  // namespace wpx
