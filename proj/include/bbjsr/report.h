#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "bbjsr/scenario.h"
#include "bbjsr/whitebox.h"

namespace bbjsr {

/// Finite doubles as numbers, infinities as the strings "inf" / "-inf".
nlohmann::json json_number(double v);

/// Every BoundsReport field plus "verdict" and "status".
nlohmann::json to_json(const BoundsReport& r);
nlohmann::json to_json(const JsrBracket& b);
nlohmann::json to_json(const RhoBracket& b);

/// N,l,gamma_star,epsilon,kappa,delta,lower,upper,upper_alt,upper_best,status
std::string bounds_csv_header();
/// Infinite bounds are written as empty cells.
std::string bounds_csv_row(const BoundsReport& r);

/// Round-trip decimal form; empty for non-finite values.
std::string csv_number(double v);

}  // namespace bbjsr
