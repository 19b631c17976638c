#pragma once

#include "demandsig/model.hpp"

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace demandsig {

class TntpError : public std::runtime_error {
 public:
  TntpError(const std::string& message, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct TntpLink {
  int init = 0;
  int term = 0;
  double capacity = 0;
  double length = 0;
  double free_flow_time = 0;
  double bpr_b = 0.15;
  int bpr_power = 4;
};

struct TntpNetwork {
  int num_zones = 0;
  int num_nodes = 0;
  int first_thru_node = 1;
  std::vector<TntpLink> links;
};

/// Reads a `_net.tntp` file: metadata tags, `~` comments, `;`-terminated rows.
TntpNetwork parse_tntp_network(std::istream& in);
TntpNetwork read_tntp_network(const std::filesystem::path& path);

/// Sum of all origin-destination entries of a `_trips.tntp` file.
double parse_tntp_trips_total(std::istream& in);
double read_tntp_trips_total(const std::filesystem::path& path);

/// a_e = eta * t0 / capacity, b_e = t0; nodes are renumbered from zero and
/// the terminals are left unset.
Network<double> bpr_to_affine(const TntpNetwork& network, double eta);

}  // namespace demandsig
