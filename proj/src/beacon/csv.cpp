#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "proxauth/beacon.hpp"

namespace proxauth {

namespace {

struct Record {
  std::vector<std::string> fields;
  std::size_t number = 0;  // 1-based, header is 1
};

// RFC-4180 style record reader: comma delimiter, double-quote quoting with
// "" as an escaped quote, LF or CRLF record terminators.  Quoted fields may
// span lines.  Blank lines are skipped and do not consume a record number.
class CsvReader {
public:
  explicit CsvReader(std::string text) : text_(std::move(text)) {
    if (text_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
  }

  bool next(Record& out) {
    while (pos_ < text_.size()) {
      if (text_[pos_] == '\n') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
        pos_ += 2;
        continue;
      }
      out.fields.clear();
      out.number = ++record_count_;
      read_record(out.fields);
      return true;
    }
    return false;
  }

private:
  void read_record(std::vector<std::string>& fields) {
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
        continue;
      }
      if (c == '"' && !was_quoted && std::all_of(field.begin(), field.end(), [](char ch) {
            return std::isspace(static_cast<unsigned char>(ch));
          })) {
        field.clear();
        quoted = true;
        was_quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n') {
        break;
      } else if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') {
        ++pos_;
        break;
      } else if (!(was_quoted && std::isspace(static_cast<unsigned char>(c)))) {
        field.push_back(c);
      }
    }
    fields.push_back(std::move(field));
  }

  std::string text_;
  std::size_t pos_ = 0;
  std::size_t record_count_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// "Frequency (Hz)" -> "frequency"; "RSSI" -> "rssi".
std::string normalize_header(std::string_view name) {
  name = trim(name);
  if (name.ends_with(')')) {
    if (const auto open = name.rfind('('); open != std::string_view::npos) {
      name = trim(name.substr(0, open));
    }
  }
  std::string out(name);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  text = trim(text);
  if (text.starts_with('+')) text.remove_prefix(1);
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

void check_header(const Record& header) {
  static const std::array<std::string, 6> expected = [] {
    std::array<std::string, 6> names;
    std::transform(kCsvColumns.begin(), kCsvColumns.end(), names.begin(), normalize_header);
    return names;
  }();
  bool ok = header.fields.size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    ok = normalize_header(header.fields[i]) == expected[i];
  }
  if (!ok) {
    std::string got;
    for (const auto& f : header.fields) got += (got.empty() ? "" : ",") + f;
    throw BeaconError("MalformedHeader",
                      "expected RPI,SSID,Frequency (Hz),RSSI (dBm),Location,Label; got \"" + got +
                          "\"");
  }
}

LabeledSample parse_row(const Record& row, const RoleMapping& mapping) {
  if (row.fields.size() != kCsvColumns.size()) {
    throw RowParseError(row.number, std::string(kCsvColumns[std::min(row.fields.size(), kCsvColumns.size() - 1)]),
                        "expected 6 fields, got " + std::to_string(row.fields.size()));
  }
  const auto fail = [&](std::size_t column, const std::string& why) {
    throw RowParseError(row.number, std::string(kCsvColumns[column]), why);
  };

  LabeledSample sample;
  const auto role = mapping.map(row.fields[0]);
  if (!role) fail(0, "cannot map \"" + row.fields[0] + "\" to a device role");
  sample.role = *role;

  sample.observation.ssid = row.fields[1];
  if (sample.observation.ssid.empty()) fail(1, "empty SSID");

  const auto frequency = parse_int<std::int64_t>(row.fields[2]);
  if (!frequency) fail(2, "not an integer: \"" + row.fields[2] + "\"");
  if (*frequency <= 0) fail(2, "frequency must be positive");
  sample.observation.frequency_hz = *frequency;

  const auto rssi = parse_int<int>(row.fields[3]);
  if (!rssi) fail(3, "not an integer: \"" + row.fields[3] + "\"");
  if (*rssi > 0) fail(3, "RSSI must be <= 0 dBm");
  sample.observation.rssi_dbm = *rssi;

  sample.location_tag = row.fields[4];

  const auto label = parse_label(row.fields[5]);
  if (!label) fail(5, "unknown label \"" + row.fields[5] + "\"");
  sample.label = *label;
  return sample;
}

bool needs_quotes(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos ||
         (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                             std::isspace(static_cast<unsigned char>(field.back()))));
}

void write_field(std::ostream& out, std::string_view field) {
  if (!needs_quotes(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

Dataset parse_dataset_csv(std::istream& source, const RoleMapping& mapping) {
  CsvReader reader(std::string(std::istreambuf_iterator<char>(source), {}));
  Record record;
  if (!reader.next(record)) throw BeaconError("MalformedHeader", "input is empty");
  check_header(record);

  Dataset dataset;
  dataset.provenance = Provenance::RealCsv;
  while (reader.next(record)) {
    dataset.samples.push_back(parse_row(record, mapping));
  }
  if (dataset.empty()) throw BeaconError("EmptyDataset", "no data rows after the header");
  return dataset;
}

Dataset load_dataset_csv(const std::filesystem::path& path, const RoleMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BeaconError("FileNotFound", "cannot open dataset " + path.string());
  return parse_dataset_csv(in, mapping);
}

void write_dataset_csv(std::ostream& sink, const Dataset& dataset, const RoleMapping& mapping) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    sink << (i ? "," : "") << kCsvColumns[i];
  }
  sink << '\n';
  const std::string mobile = mapping.render(DeviceRole::Mobile);
  const std::string login = mapping.render(DeviceRole::Login);
  for (const auto& s : dataset.samples) {
    write_field(sink, s.role == DeviceRole::Mobile ? mobile : login);
    sink << ',';
    write_field(sink, s.observation.ssid);
    sink << ',' << s.observation.frequency_hz << ',' << s.observation.rssi_dbm << ',';
    write_field(sink, s.location_tag);
    sink << ',' << to_string(s.label) << '\n';
  }
}

void save_dataset_csv(const std::filesystem::path& path, const Dataset& dataset,
                      const RoleMapping& mapping) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BeaconError("FileNotWritable", "cannot write dataset " + path.string());
  write_dataset_csv(out, dataset, mapping);
  if (!out) throw BeaconError("FileNotWritable", "write failed for " + path.string());
}

}  // namespace proxauth
