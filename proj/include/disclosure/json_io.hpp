#pragma once

// JSON views of the public result types. Kept in one place so the CLI and
// tests agree on field names.

#include <json.hpp>

#include "disclosure/equilibrium.hpp"
#include "disclosure/estimation.hpp"
#include "disclosure/types.hpp"

namespace disclosure {

nlohmann::json to_json(const GameSpec& g);
GameSpec game_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KktResiduals& r);
nlohmann::json to_json(const CertificateEntry& e);
nlohmann::json to_json(const EquilibriumReport& report);

nlohmann::json to_json(const PowerLawFit& fit);
nlohmann::json to_json(const NullLinearFit& fit);
nlohmann::json to_json(const ResidualDiagnostics& diag);
nlohmann::json to_json(const LinearFit& fit);
nlohmann::json to_json(const EstimateResult& result);
nlohmann::json to_json(const ConstrainedLsqResult& result);

}  // namespace disclosure
