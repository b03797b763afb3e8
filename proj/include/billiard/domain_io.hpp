#ifndef BILLIARD_DOMAIN_IO_HPP
#define BILLIARD_DOMAIN_IO_HPP

#include <string>

#include "billiard/geometry.hpp"

namespace billiard {

/// Parses a domain spec file:
///   {"type": "circle"|"ellipse"|"support_fourier", "params": {...}, "nodes": N}
/// with params.R for circles, params.a/params.b for ellipses, and
/// params.a0 plus params.coefficients = [[n, a_n, b_n], ...] for Fourier
/// support functions. Throws BadSpec on malformed input.
DomainSpec parse_domain_spec_json(const std::string& text);

DomainSpec load_domain_spec(const std::string& path);

SupportDomain load_domain(const std::string& path);

std::string domain_spec_to_json(const DomainSpec& spec);

} // namespace billiard

#endif
