#pragma once

#include <string>
#include <vector>

#include "dimwalk/bernstein.hpp"

namespace dimwalk {

/// A catalog entry: a named Bernstein function plus its analytic
/// classification, used by the verification suites as ground truth.
struct CatalogEntry {
    BernsteinSpec spec;
    HwVerdict expected_hw;
    bool has_closed_density;  // subordinator density available in closed form
};

/// The five standard models: drift, stable12 (f = sqrt(u)), gamma
/// (f = log(1+u)), ig (f = sqrt(u+1)-1), cp (f = 2u/(1+u)).
const std::vector<CatalogEntry>& catalog();

/// Look up a catalog entry by name; throws std::invalid_argument if unknown.
const CatalogEntry& catalog_entry(const std::string& name);

}  // namespace dimwalk
