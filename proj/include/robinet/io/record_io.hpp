// Copyright 2026 The Robinet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robinet/core/record.hpp"

namespace robinet::io {

using nlohmann::json;

inline constexpr int kRecordFormatVersion = 1;

enum class RecordEncoding { Jsonl, Binary };

/// Header of a record file. The body is either one JSON object per bin
/// ({"values": [...]}) or, for large ensembles, packed little-endian 64-bit
/// floats (diffusive) / 64-bit counts (jump) row-major after the header line.
struct RecordHeader {
    double dt = 0.0;
    long n_bins = 0;
    std::vector<ChannelKind> channels;
    RecordEncoding encoding = RecordEncoding::Jsonl;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> model_fingerprint;
    std::optional<std::string> config_fingerprint;

    json to_json() const {
        json h{{"format", "robinet-record"},
               {"version", kRecordFormatVersion},
               {"dt", dt},
               {"n_bins", n_bins},
               {"encoding", encoding == RecordEncoding::Jsonl ? "jsonl" : "binary"}};
        h["channels"] = json::array();
        for (auto k : channels) h["channels"].push_back({{"kind", to_string(k)}});
        json prov = json::object();
        if (seed) prov["seed"] = *seed;
        if (model_fingerprint) prov["model_fingerprint"] = *model_fingerprint;
        if (config_fingerprint) prov["config_fingerprint"] = *config_fingerprint;
        if (!prov.empty()) h["provenance"] = prov;
        return h;
    }

    static RecordHeader parse(const std::string& line) {
        json h = json::parse(line, nullptr, false);
        require(!h.is_discarded() && h.is_object(), "record header: malformed JSON");
        require(h.value("format", "") == "robinet-record", "record header: unknown format");
        require(h.value("version", -1) == kRecordFormatVersion,
                "record header: version mismatch (expected " +
                    std::to_string(kRecordFormatVersion) + ")");
        RecordHeader out;
        require(h.contains("dt") && h["dt"].is_number(), "record header: missing dt");
        out.dt = h["dt"].get<double>();
        out.n_bins = h.value("n_bins", 0L);
        require(h.contains("channels") && h["channels"].is_array() && !h["channels"].empty(),
                "record header: missing channels");
        for (const auto& c : h["channels"]) {
            const std::string kind = c.value("kind", "");
            require(kind == "diffusive" || kind == "jump",
                    "record header: channel kind must be diffusive or jump");
            out.channels.push_back(kind == "diffusive" ? ChannelKind::Diffusive
                                                       : ChannelKind::Jump);
        }
        const std::string enc = h.value("encoding", "jsonl");
        require(enc == "jsonl" || enc == "binary", "record header: unknown encoding");
        out.encoding = enc == "jsonl" ? RecordEncoding::Jsonl : RecordEncoding::Binary;
        if (h.contains("provenance")) {
            const auto& p = h["provenance"];
            if (p.contains("seed")) out.seed = p["seed"].get<std::uint64_t>();
            if (p.contains("model_fingerprint"))
                out.model_fingerprint = p["model_fingerprint"].get<std::string>();
            if (p.contains("config_fingerprint"))
                out.config_fingerprint = p["config_fingerprint"].get<std::string>();
        }
        return out;
    }
};

/// Streaming writer; rows are flushed as they come, so multi-gigabyte
/// ensembles never sit in memory.
class RecordWriter {
  public:
    RecordWriter(const std::string& path, RecordHeader header)
        : header_(std::move(header)), out_(path, std::ios::binary) {
        require(out_.good(), "write_record: cannot open " + path);
        out_ << header_.to_json().dump() << '\n';
    }

    void row(const std::vector<double>& values) {
        require(int(values.size()) == int(header_.channels.size()),
                "write_record: row arity mismatch");
        if (header_.encoding == RecordEncoding::Jsonl) {
            out_ << json{{"values", values}}.dump() << '\n';
        } else {
            for (std::size_t c = 0; c < values.size(); ++c) {
                if (header_.channels[c] == ChannelKind::Jump) {
                    const std::int64_t n = std::int64_t(values[c]);
                    out_.write(reinterpret_cast<const char*>(&n), 8);
                } else {
                    out_.write(reinterpret_cast<const char*>(&values[c]), 8);
                }
            }
        }
        ++rows_;
    }

    void close() {
        if (out_.is_open()) {
            require(rows_ == header_.n_bins,
                    "write_record: row count does not match header n_bins");
            out_.close();
        }
    }
    ~RecordWriter() {
        try {
            close();
        } catch (...) {
        }
    }

  private:
    RecordHeader header_;
    std::ofstream out_;
    long rows_ = 0;
};

/// Streaming reader: header first, then one row at a time.
class RecordReader {
  public:
    explicit RecordReader(const std::string& path) : in_(path, std::ios::binary) {
        require(in_.good(), "read_record: cannot open " + path);
        std::string line;
        require(bool(std::getline(in_, line)), "read_record: empty file");
        header_ = RecordHeader::parse(line);
    }

    const RecordHeader& header() const { return header_; }

    bool next_row(std::vector<double>& values) {
        values.assign(header_.channels.size(), 0.0);
        if (row_ >= header_.n_bins) return false;
        if (header_.encoding == RecordEncoding::Jsonl) {
            std::string line;
            if (!std::getline(in_, line))
                throw validation_error("read_record: body ended early at row " +
                                       std::to_string(row_));
            json r = json::parse(line, nullptr, false);
            if (r.is_discarded() || !r.contains("values") || !r["values"].is_array() ||
                int(r["values"].size()) != int(header_.channels.size()))
                throw validation_error("read_record: malformed row " + std::to_string(row_));
            for (std::size_t c = 0; c < values.size(); ++c) values[c] = r["values"][c];
        } else {
            for (std::size_t c = 0; c < values.size(); ++c) {
                char buf[8];
                if (!in_.read(buf, 8))
                    throw validation_error("read_record: body ended early at row " +
                                           std::to_string(row_));
                if (header_.channels[c] == ChannelKind::Jump) {
                    std::int64_t n;
                    std::memcpy(&n, buf, 8);
                    values[c] = double(n);
                } else {
                    std::memcpy(&values[c], buf, 8);
                }
            }
        }
        ++row_;
        return true;
    }

  private:
    std::ifstream in_;
    RecordHeader header_;
    long row_ = 0;
};

inline void write_record(const std::string& path, const DigitizedRecord& record,
                         RecordEncoding encoding = RecordEncoding::Jsonl,
                         std::optional<std::uint64_t> seed = std::nullopt,
                         std::optional<std::string> model_fp = std::nullopt,
                         std::optional<std::string> config_fp = std::nullopt) {
    record.validate();
    RecordHeader h;
    h.dt = record.dt;
    h.n_bins = record.n_bins();
    h.channels = record.channels;
    h.encoding = encoding;
    h.seed = seed;
    h.model_fingerprint = std::move(model_fp);
    h.config_fingerprint = std::move(config_fp);
    RecordWriter w(path, h);
    for (const auto& row : record.values) w.row(row);
    w.close();
}

inline DigitizedRecord read_record(const std::string& path) {
    RecordReader reader(path);
    DigitizedRecord rec;
    rec.dt = reader.header().dt;
    rec.channels = reader.header().channels;
    std::vector<double> row;
    while (reader.next_row(row)) rec.values.push_back(row);
    rec.validate();
    return rec;
}

}  // namespace robinet::io
