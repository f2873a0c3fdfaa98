#include "dimwalk/catalog.hpp"

namespace dimwalk {

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {BernsteinSpec::drift_only(1.0).with_name("drift"), HwVerdict::holds, true},
        {BernsteinSpec::stable(0.5, 1.0).with_name("stable12"), HwVerdict::holds, true},
        {BernsteinSpec::gamma(1.0, 1.0).with_name("gamma"), HwVerdict::fails, true},
        {BernsteinSpec::inverse_gaussian(1.0).with_name("ig"), HwVerdict::holds, true},
        {BernsteinSpec::exponential_cp(2.0, 1.0).with_name("cp"), HwVerdict::fails,
         true},
    };
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.spec.name() == name) return e;
    throw std::invalid_argument("unknown catalog model '" + name + "'");
}

}  // namespace dimwalk
