#pragma once

#include <string>

#include <json.hpp>

#include "fjcert/engine.hpp"

namespace fjcert::cli {

using Json = nlohmann::ordered_json;

Json rational_array(std::span<const Rational> values);
Json float_array(std::span<const Rational> values);

Json problem_json(const Problem& pr, const std::string& source);
Json point_json(const Point& x);
Json certificate_json(const FJCertificate& c);
Json qualification_json(const QualificationReport& q);

/// Full `certify` report. `verification` holds the independent FD re-check of
/// the reported certificate when one exists.
Json certification_json(const Problem& pr, const std::string& source, const Point& x, const Certification& c,
                        const VerificationReport* verification);

/// Reads back the certificate embedded in a `certify` JSON report
/// (the top-level lambda/mu/regime/normalization keys).
FJCertificate certificate_from_json(const Json& report);

}  // namespace fjcert::cli
