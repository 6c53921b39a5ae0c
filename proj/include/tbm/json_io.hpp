#pragma once

#include <json.hpp>
#include <string>

#include "tbm/ziglin.hpp"

namespace tbm {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCertificateSchema = "tbm-certificate/1";
inline constexpr const char* kSoftwareVersion = "1.0.0";

Json to_json(cplx z);  // [re, im]
// Row-major: [[[re, im], ...], ...].
template <typename Derived>
Json matrix_json(const Eigen::MatrixBase<Derived>& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(to_json(cplx(M(i, j))));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const MassTriple& m);
Json to_json(const LagrangeParam& p);
Json to_json(const FuchsianSystem& fs);
Json to_json(const MonodromySet& ms);
Json to_json(const CertifyConfig& c);
Json to_json(const Certificate& c);

// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string digest(const Json& j);

}  // namespace tbm
