#include "gitaudit/store.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gitaudit/errors.hpp"
#include "gitaudit/shortlog.hpp"

namespace gitaudit {

using ojson = nlohmann::ordered_json;

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

ojson encode_string(const std::string& s) {
  if (is_valid_utf8(s)) return s;
  std::string hex;
  hex.reserve(s.size() * 2);
  for (unsigned char c : s) {
    hex += kHexDigits[c >> 4];
    hex += kHexDigits[c & 0xF];
  }
  return ojson{{"hex", hex}};
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string decode_string(const ojson& j) {
  if (j.is_string()) return j.get<std::string>();
  const auto& hex = j.at("hex").get_ref<const std::string&>();
  if (hex.size() % 2) throw std::invalid_argument("odd-length hex string");
  std::string out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]), lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
    out += static_cast<char>(hi * 16 + lo);
  }
  return out;
}

ojson encode_set(const std::set<std::string>& s) {
  ojson arr = ojson::array();
  for (const auto& v : s) arr.push_back(encode_string(v));
  return arr;
}

std::set<std::string> decode_set(const ojson& arr) {
  if (!arr.is_array()) throw std::invalid_argument("expected array");
  std::set<std::string> out;
  for (const auto& v : arr) out.insert(decode_string(v));
  return out;
}

Person decode_person(const ojson& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  Person p;
  p.id = j.at("id").get<PersonId>();
  p.names = decode_set(j.at("names"));
  p.emails = decode_set(j.at("emails"));
  p.usernames = decode_set(j.at("usernames"));
  const auto& contrib = j.at("contributions");
  if (!contrib.is_array()) throw std::invalid_argument("contributions must be an array");
  for (const auto& pair : contrib) {
    if (!pair.is_array() || pair.size() != 2) throw std::invalid_argument("contribution must be [repo, commits]");
    auto repo = decode_string(pair[0]);
    auto n = pair[1].get<std::int64_t>();
    if (n < 1) throw std::invalid_argument("commit count must be >= 1");
    if (!p.contributions.emplace(repo, n).second) throw std::invalid_argument("duplicate repository " + repo);
  }
  p.lines = j.at("lines").get<std::int64_t>();
  if (p.lines < 0) throw std::invalid_argument("negative line count");
  return p;
}

}  // namespace

std::string serialize_database(const PersonDatabase& db) {
  std::string out;
  for (const Person* p : db.persons()) {
    ojson j;
    j["id"] = p->id;
    j["names"] = encode_set(p->names);
    j["emails"] = encode_set(p->emails);
    j["usernames"] = encode_set(p->usernames);
    ojson contrib = ojson::array();
    for (const auto& [repo, n] : p->contributions) contrib.push_back(ojson::array({encode_string(repo), n}));
    j["contributions"] = std::move(contrib);
    j["lines"] = p->lines;
    out += j.dump();
    out += '\n';
  }
  return out;
}

PersonDatabase parse_database(const std::string& text) {
  std::vector<Person> persons;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      persons.push_back(decode_person(ojson::parse(line)));
    } catch (const std::exception& e) {
      throw CorruptRecord(line_no, e.what());
    }
  }
  return PersonDatabase::from_persons(std::move(persons));
}

void save_database(const PersonDatabase& db, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << serialize_database(db);
  if (!out) throw IoError("write failed: " + path.string());
}

PersonDatabase load_database(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_database(ss.str());
}

bool same_database(const PersonDatabase& a, const PersonDatabase& b) {
  auto pa = a.persons(), pb = b.persons();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (!(*pa[i] == *pb[i])) return false;
  return true;
}

void save_pipeline_stats(const PipelineStats& s, const std::filesystem::path& path) {
  ojson j;
  j["fetched"] = s.fetched;
  j["selected"] = s.selected;
  j["cloned"] = s.cloned;
  j["failed"] = s.failed;
  j["on_disk_high_water"] = s.on_disk_high_water;
  j["wall_times"] = {{"fetch", s.wall_times.fetch},       {"clone", s.wall_times.clone},
                     {"shortlog", s.wall_times.shortlog}, {"merge", s.wall_times.merge},
                     {"total", s.wall_times.total}};
  j["failures"] = ojson::array();
  for (const auto& f : s.failures)
    j["failures"].push_back({{"full_name", f.full_name}, {"reason", to_display_utf8(f.reason)}});
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

PipelineStats load_pipeline_stats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  PipelineStats s;
  try {
    auto j = ojson::parse(in);
    s.fetched = j.at("fetched").get<std::size_t>();
    s.selected = j.at("selected").get<std::size_t>();
    s.cloned = j.at("cloned").get<std::size_t>();
    s.failed = j.at("failed").get<std::size_t>();
    s.on_disk_high_water = j.value("on_disk_high_water", std::size_t{0});
    const auto& w = j.at("wall_times");
    s.wall_times = {w.at("fetch").get<double>(), w.at("clone").get<double>(),
                    w.at("shortlog").get<double>(), w.at("merge").get<double>(),
                    w.at("total").get<double>()};
    for (const auto& f : j.at("failures"))
      s.failures.push_back({f.at("full_name").get<std::string>(), f.at("reason").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw CorruptRecord(1, e.what());
  }
  return s;
}

}  // namespace gitaudit
