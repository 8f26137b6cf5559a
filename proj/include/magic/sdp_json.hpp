#pragma once

// Text dump of SdpProblem for debugging; see docs/formats.md.

#include <string>

#include "io.hpp"
#include "sdp.hpp"

namespace magic::sdp {

inline io::json functional_to_json(const LinearFunctional& f) {
  io::json psd = io::json::array(), scalar = io::json::array();
  for (const auto& t : f.psd) psd.push_back({{"block", t.block}, {"coeff", io::matrix_to_json(t.coeff)}});
  for (const auto& t : f.scalar)
    scalar.push_back({{"block", t.block}, {"index", t.index}, {"coeff", t.coeff}});
  return {{"psd", psd}, {"scalar", scalar}};
}

inline io::json to_json(const SdpProblem& p) {
  io::json blocks = io::json::array();
  for (const auto& b : p.blocks())
    blocks.push_back(
        {{"kind", b.kind == BlockKind::PsdHermitian ? "psd_hermitian" : "nonneg_scalar"},
         {"dim", b.dim}});
  io::json eqs = io::json::array();
  for (const auto& e : p.equalities())
    eqs.push_back({{"lhs", functional_to_json(e.lhs)}, {"rhs", e.rhs}});
  return {{"schema_version", io::kSchemaVersion},
          {"sense", p.sense() == Sense::Minimize ? "minimize" : "maximize"},
          {"blocks", blocks},
          {"objective", functional_to_json(p.objective())},
          {"equalities", eqs}};
}

inline LinearFunctional functional_from_json(const io::json& j) {
  LinearFunctional f;
  try {
    for (const auto& t : j.at("psd"))
      f.add(t.at("block").get<std::size_t>(), io::matrix_from_json(t.at("coeff")));
    for (const auto& t : j.at("scalar"))
      f.add(t.at("block").get<std::size_t>(), t.at("index").get<int>(), t.at("coeff").get<double>());
  } catch (const io::json::exception& e) {
    throw InputError(std::string("SDP functional: ") + e.what());
  }
  return f;
}

inline SdpProblem problem_from_json(const io::json& j) {
  SdpProblem p;
  try {
    if (j.at("schema_version").get<int>() != io::kSchemaVersion)
      throw InputError("SDP document: unsupported schema_version");
    for (const auto& b : j.at("blocks")) {
      const std::string kind = b.at("kind").get<std::string>();
      const int dim = b.at("dim").get<int>();
      if (kind == "psd_hermitian")
        p.add_psd_block(dim);
      else if (kind == "nonneg_scalar")
        p.add_nonneg_block(dim);
      else
        throw InputError("SDP document: unknown block kind " + kind);
    }
    for (const auto& e : j.at("equalities"))
      p.add_equality(functional_from_json(e.at("lhs")), e.at("rhs").get<double>());
    const std::string sense = j.at("sense").get<std::string>();
    if (sense != "minimize" && sense != "maximize")
      throw InputError("SDP document: unknown sense " + sense);
    p.set_objective(functional_from_json(j.at("objective")),
                    sense == "minimize" ? Sense::Minimize : Sense::Maximize);
  } catch (const io::json::exception& e) {
    throw InputError(std::string("SDP document: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace magic::sdp
