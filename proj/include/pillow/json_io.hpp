#pragma once

// JSON views of result types. Non-finite reals are written as null.

#include <string>

#include <json.hpp>

#include "pillow/bounds.hpp"
#include "pillow/estimator.hpp"
#include "pillow/majorant.hpp"

namespace pillow {

nlohmann::ordered_json to_json(const GridFn1D& g);
nlohmann::ordered_json to_json(const GridFn2D& g);  // rows i = 0..n
nlohmann::ordered_json to_json(const McEstimate& e);
nlohmann::ordered_json to_json(const MajorantResult1D& m);
nlohmann::ordered_json to_json(const ProjectionResult& pr);
nlohmann::ordered_json to_json(const VerificationReport& v);
nlohmann::ordered_json to_json(const Psi0Bound& b);
nlohmann::ordered_json to_json(const ProductBounds& b);
nlohmann::ordered_json to_json(const BoundReport& r);
nlohmann::ordered_json to_json(const SweepResult& s);

/// Plot-ready sweep table: gamma,log_psi,rate,remainder,std_err.
std::string sweep_csv(const SweepResult& s);

}  // namespace pillow
