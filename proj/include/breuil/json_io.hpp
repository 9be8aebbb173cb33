#pragma once

#include <json.hpp>

#include "breuil/reduction.hpp"

namespace breuil {

inline constexpr const char* schema_version = "1";

using json = nlohmann::json;

json to_json(const OE& x);
json to_json(const RElem& x);
json to_json(const SpecialElement& el);
json to_json(const CharacterDescriptor& chi, const SmallField& kE);
json to_json(const ReductionReport& rep, const SmallField& kE);
json to_json(const WadmReport& rep);
json to_json(const SdmReport& rep);
json to_json(const SurjectivityReport& rep);
json to_json(const DefRingAnswer& ans);
json to_json(const BreuilModule& M);
json sdm_to_json(const SDModule& M);
json morphisms_to_json(const std::vector<std::vector<std::vector<BElt>>>& homs);

} // namespace breuil
