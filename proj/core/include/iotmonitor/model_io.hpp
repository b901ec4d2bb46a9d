#ifndef IOTMONITOR_MODEL_IO_HPP
#define IOTMONITOR_MODEL_IO_HPP

// Plain-text model documents:
//
//   iotmonitor-hmm 1
//   states <N>
//   <label>                      (N lines)
//   evidence <M> <id>...
//   symbols <K>
//   <count> <id>...              (K lines, ids sorted)
//   initial
//   <N reals>
//   transitions
//   <N reals>                    (N lines)
//   emissions
//   <K reals>                    (N lines)
//
// Reals are written with 17 significant digits, so save followed by load
// reproduces every parameter bit for bit.

#include <filesystem>
#include <iosfwd>

#include "iotmonitor/hmm.hpp"

namespace iotmonitor {

void save_model(std::ostream& out, const HmmModel& model);
void save_model(const std::filesystem::path& path, const HmmModel& model);

/// Throws ParseError on malformed documents and ModelError when the decoded
/// parameters are not stochastic.
HmmModel load_model(std::istream& in);
HmmModel load_model(const std::filesystem::path& path);

}  // namespace iotmonitor

#endif  // IOTMONITOR_MODEL_IO_HPP
