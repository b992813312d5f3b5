#include "admiral/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace admiral {

namespace {

std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_double(const std::string& token, const std::string& path) {
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw IoError("bad number '" + token + "' in " + path);
  return v;
}

std::string expect_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("truncated file: " + path);
  return line;
}

}  // namespace

void save_qtable(const JointQTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "admiral-qtable 1\n";
  out << "agent_index " << table.agent_index() << "\n";
  out << "actions";
  for (int s : table.space().sizes()) out << ' ' << s;
  out << "\n";
  out << "states " << table.state_count() << "\n";
  for (StateId s = 0; s < table.state_count(); ++s) {
    auto slice = table.slice(s);
    for (std::size_t i = 0; i < slice.size(); ++i)
      out << (i == 0 ? "" : " ") << hex_double(slice[i]);
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

JointQTable load_qtable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string magic, field;
  int version = 0;
  std::istringstream header(expect_line(in, path));
  header >> magic >> version;
  if (magic != "admiral-qtable" || version != 1)
    throw IoError("not an admiral-qtable v1 file: " + path);

  int agent_index = 0;
  {
    std::istringstream line(expect_line(in, path));
    line >> field >> agent_index;
    if (field != "agent_index") throw IoError("expected agent_index in " + path);
  }
  std::vector<int> sizes;
  {
    std::istringstream line(expect_line(in, path));
    line >> field;
    if (field != "actions") throw IoError("expected actions in " + path);
    int v;
    while (line >> v) sizes.push_back(v);
  }
  int states = 0;
  {
    std::istringstream line(expect_line(in, path));
    line >> field >> states;
    if (field != "states") throw IoError("expected states in " + path);
  }

  JointQTable table(agent_index, states, ActionSpace(sizes));
  for (StateId s = 0; s < states; ++s) {
    std::istringstream line(expect_line(in, path));
    std::string token;
    auto slice = table.slice(s);
    for (int i = 0; i < table.joint_count(); ++i) {
      if (!(line >> token)) throw IoError("short state row in " + path);
      slice[i] = parse_double(token, path);
    }
  }
  return table;
}

void save_weights(const std::vector<int>& layer_sizes, const std::vector<double>& params,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "admiral-weights 1\n";
  out << "layers";
  for (int s : layer_sizes) out << ' ' << s;
  out << "\n";
  out << "params " << params.size() << "\n";
  for (std::size_t i = 0; i < params.size(); ++i) {
    out << hex_double(params[i]) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void load_weights(const std::string& path, std::vector<int>& layer_sizes,
                  std::vector<double>& params) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string magic, field;
  int version = 0;
  std::istringstream header(expect_line(in, path));
  header >> magic >> version;
  if (magic != "admiral-weights" || version != 1)
    throw IoError("not an admiral-weights v1 file: " + path);

  layer_sizes.clear();
  {
    std::istringstream line(expect_line(in, path));
    line >> field;
    if (field != "layers") throw IoError("expected layers in " + path);
    int v;
    while (line >> v) layer_sizes.push_back(v);
  }
  std::size_t count = 0;
  {
    std::istringstream line(expect_line(in, path));
    line >> field >> count;
    if (field != "params") throw IoError("expected params in " + path);
  }
  params.resize(count);
  for (std::size_t i = 0; i < count; ++i) params[i] = parse_double(expect_line(in, path), path);
}

}  // namespace admiral
