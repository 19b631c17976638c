#include "demandsig/tntp.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace demandsig {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double number(const std::string& token, int line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw TntpError("bad number '" + token + "'", line);
  }
  return v;
}

int integer(const std::string& token, int line) {
  const double v = number(token, line);
  if (v != static_cast<int>(v)) throw TntpError("expected an integer, got '" + token + "'", line);
  return static_cast<int>(v);
}

}  // namespace

TntpNetwork parse_tntp_network(std::istream& in) {
  TntpNetwork net;
  int declared_links = -1;
  bool metadata_done = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip(raw);
    if (s.empty() || s[0] == '~') continue;
    if (!metadata_done) {
      if (s[0] != '<') throw TntpError("expected a metadata tag", line);
      const auto close = s.find('>');
      if (close == std::string::npos) throw TntpError("unterminated metadata tag", line);
      const std::string tag = s.substr(1, close - 1);
      const std::string value = strip(s.substr(close + 1));
      if (tag == "END OF METADATA") {
        metadata_done = true;
      } else if (tag == "NUMBER OF ZONES") {
        net.num_zones = integer(value, line);
      } else if (tag == "NUMBER OF NODES") {
        net.num_nodes = integer(value, line);
      } else if (tag == "FIRST THRU NODE") {
        net.first_thru_node = integer(value, line);
      } else if (tag == "NUMBER OF LINKS") {
        declared_links = integer(value, line);
      }
      continue;
    }
    if (const auto semi = s.find(';'); semi != std::string::npos) s = s.substr(0, semi);
    std::istringstream fields(s);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 5) {
      throw TntpError("link row has " + std::to_string(tok.size()) + " fields, need at least 5",
                      line);
    }
    TntpLink link;
    link.init = integer(tok[0], line);
    link.term = integer(tok[1], line);
    link.capacity = number(tok[2], line);
    link.length = number(tok[3], line);
    link.free_flow_time = number(tok[4], line);
    if (tok.size() > 5) link.bpr_b = number(tok[5], line);
    if (tok.size() > 6) link.bpr_power = integer(tok[6], line);
    if (link.init < 1 || link.init > net.num_nodes || link.term < 1 || link.term > net.num_nodes) {
      throw TntpError("link endpoint outside 1.." + std::to_string(net.num_nodes), line);
    }
    net.links.push_back(link);
  }
  if (!metadata_done) throw TntpError("missing <END OF METADATA>", line);
  if (net.num_nodes <= 0) throw TntpError("missing <NUMBER OF NODES>", 0);
  if (declared_links >= 0 && declared_links != static_cast<int>(net.links.size())) {
    throw TntpError("header declares " + std::to_string(declared_links) + " links, found " +
                        std::to_string(net.links.size()),
                    line);
  }
  return net;
}

TntpNetwork read_tntp_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TntpError("cannot open " + path.string(), 0);
  return parse_tntp_network(in);
}

double parse_tntp_trips_total(std::istream& in) {
  double total = 0;
  std::string raw;
  int line = 0;
  bool metadata_done = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip(raw);
    if (s.empty() || s[0] == '~') continue;
    if (!metadata_done) {
      if (s.rfind("<END OF METADATA>", 0) == 0) metadata_done = true;
      if (s[0] == '<') continue;
      metadata_done = true;
    }
    if (s.rfind("Origin", 0) == 0) continue;
    std::istringstream entries(s);
    std::string entry;
    while (std::getline(entries, entry, ';')) {
      entry = strip(entry);
      if (entry.empty()) continue;
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw TntpError("expected 'dest : value'", line);
      total += number(strip(entry.substr(colon + 1)), line);
    }
  }
  return total;
}

double read_tntp_trips_total(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TntpError("cannot open " + path.string(), 0);
  return parse_tntp_trips_total(in);
}

Network<double> bpr_to_affine(const TntpNetwork& tn, double eta) {
  Network<double> net;
  net.num_vertices = tn.num_nodes;
  for (const auto& link : tn.links) {
    if (link.capacity <= 0) {
      throw TntpError("link " + std::to_string(link.init) + "-" + std::to_string(link.term) +
                          " has nonpositive capacity",
                      0);
    }
    net.edges.push_back(
        {link.init - 1, link.term - 1, {eta * link.free_flow_time / link.capacity, link.free_flow_time}});
  }
  return net;
}

}  // namespace demandsig
