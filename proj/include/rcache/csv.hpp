#pragma once

#include <iosfwd>
#include <string>

#include "rcache/campaign.hpp"

namespace rcache {

inline constexpr int kCsvVersion = 1;

/// Header comment, column names, then one row per trial. Numbers are printed
/// with round-trip precision so identical results give identical bytes.
void write_csv(std::ostream& out, const CampaignResult& result);
std::string to_csv(const CampaignResult& result);

}  // namespace rcache
