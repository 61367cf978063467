// Copyright 2026 the kgsr authors
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

#include "kgsr/kg/graph_io.hpp"

#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "kgsr/error.hpp"

namespace kgsr::kg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

// Calls fn(line, line_no) for each non-empty line, stripping a trailing CR.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fn(line, line_no);
    }
}

json parse_object(const std::string& line, const std::string& origin, int line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        fail(origin, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) fail(origin, line_no, "expected a JSON object");
    return obj;
}

std::string string_field(const json& obj, const char* name, const std::string& origin, int line_no) {
    auto it = obj.find(name);
    if (it == obj.end() || !it->is_string()) fail(origin, line_no, std::string("missing string field `") + name + "`");
    return it->get<std::string>();
}

template <typename T, typename Fn>
std::vector<T> load_with(const std::string& path, Fn&& reader) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return reader(in, path);
}

}  // namespace

std::vector<Entity> read_entities(std::istream& in, const std::string& origin) {
    std::vector<Entity> out;
    for_each_line(in, [&](const std::string& line, int no) {
        auto f = split_tabs(line);
        if (f.size() != 3) fail(origin, no, "expected 3 tab-separated fields (id, kind, label)");
        if (f[0].empty()) fail(origin, no, "empty entity id");
        auto kind = parse_entity_kind(f[1]);
        if (!kind) fail(origin, no, "unknown entity kind `" + f[1] + "`");
        out.push_back({f[0], *kind, f[2]});
    });
    return out;
}

std::vector<TripleSpec> read_triples(std::istream& in, const std::string& origin) {
    std::vector<TripleSpec> out;
    for_each_line(in, [&](const std::string& line, int no) {
        auto f = split_tabs(line);
        if (f.size() != 3) fail(origin, no, "expected 3 tab-separated fields (head, relation, tail)");
        if (f[0].empty() || f[2].empty()) fail(origin, no, "empty entity id");
        auto rel = parse_relation_kind(f[1]);
        if (!rel) fail(origin, no, "unknown relation `" + f[1] + "`");
        out.push_back({f[0], *rel, f[2]});
    });
    return out;
}

std::vector<RawInteraction> read_interactions(std::istream& in, const std::string& origin) {
    std::vector<RawInteraction> out;
    for_each_line(in, [&](const std::string& line, int no) {
        auto obj = parse_object(line, origin, no);
        RawInteraction r;
        r.user = string_field(obj, "user", origin, no);
        r.ad = string_field(obj, "ad", origin, no);
        auto label = obj.find("label");
        if (label == obj.end() || !label->is_number_integer()) fail(origin, no, "missing integer field `label`");
        r.label = label->get<int>();
        if (r.label != 0 && r.label != 1) fail(origin, no, "label must be 0 or 1");
        auto ts = obj.find("ts");
        if (ts == obj.end() || !ts->is_number_integer()) fail(origin, no, "missing integer field `ts`");
        r.timestamp = ts->get<std::int64_t>();
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<AdText> read_ad_texts(std::istream& in, const std::string& origin) {
    std::vector<AdText> out;
    for_each_line(in, [&](const std::string& line, int no) {
        auto obj = parse_object(line, origin, no);
        out.push_back({string_field(obj, "ad_id", origin, no), string_field(obj, "text", origin, no)});
    });
    return out;
}

std::vector<UserTags> read_user_tags(std::istream& in, const std::string& origin) {
    std::vector<UserTags> out;
    for_each_line(in, [&](const std::string& line, int no) {
        auto obj = parse_object(line, origin, no);
        UserTags u;
        u.user_id = string_field(obj, "user_id", origin, no);
        auto tags = obj.find("tags");
        if (tags == obj.end() || !tags->is_array()) fail(origin, no, "missing array field `tags`");
        for (const auto& t : *tags) {
            if (!t.is_string()) fail(origin, no, "tags must be strings");
            u.tags.push_back(t.get<std::string>());
        }
        out.push_back(std::move(u));
    });
    return out;
}

void write_entities(std::ostream& out, const std::vector<Entity>& entities) {
    for (const auto& e : entities) out << e.id << '\t' << to_string(e.kind) << '\t' << e.label << '\n';
}

void write_triples(std::ostream& out, const std::vector<TripleSpec>& triples) {
    for (const auto& t : triples) out << t.head << '\t' << to_string(t.relation) << '\t' << t.tail << '\n';
}

void write_interactions(std::ostream& out, const std::vector<RawInteraction>& rows) {
    for (const auto& r : rows) {
        json obj = {{"user", r.user}, {"ad", r.ad}, {"label", r.label}, {"ts", r.timestamp}};
        out << obj.dump() << '\n';
    }
}

void write_ad_texts(std::ostream& out, const std::vector<AdText>& rows) {
    for (const auto& r : rows) out << json{{"ad_id", r.ad_id}, {"text", r.text}}.dump() << '\n';
}

void write_user_tags(std::ostream& out, const std::vector<UserTags>& rows) {
    for (const auto& r : rows) out << json{{"user_id", r.user_id}, {"tags", r.tags}}.dump() << '\n';
}

std::vector<Entity> load_entities(const std::string& path) {
    return load_with<Entity>(path, [](std::istream& in, const std::string& o) { return read_entities(in, o); });
}

std::vector<TripleSpec> load_triples(const std::string& path) {
    return load_with<TripleSpec>(path, [](std::istream& in, const std::string& o) { return read_triples(in, o); });
}

std::vector<RawInteraction> load_interactions(const std::string& path) {
    return load_with<RawInteraction>(path,
                                     [](std::istream& in, const std::string& o) { return read_interactions(in, o); });
}

std::vector<AdText> load_ad_texts(const std::string& path) {
    return load_with<AdText>(path, [](std::istream& in, const std::string& o) { return read_ad_texts(in, o); });
}

std::vector<UserTags> load_user_tags(const std::string& path) {
    return load_with<UserTags>(path, [](std::istream& in, const std::string& o) { return read_user_tags(in, o); });
}

std::vector<InteractionRecord> resolve_interactions(const KnowledgeGraph& graph,
                                                    const std::vector<RawInteraction>& raw) {
    std::vector<InteractionRecord> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
        const EntityId u = graph.require(r.user);
        const EntityId a = graph.require(r.ad);
        if (graph.entity(u).kind != EntityKind::User) {
            throw Error(ErrorCode::UnknownEntity, "`" + r.user + "` is not a User");
        }
        if (graph.entity(a).kind != EntityKind::Ad) throw Error(ErrorCode::UnknownEntity, "`" + r.ad + "` is not an Ad");
        if (r.label != 0 && r.label != 1) throw Error(ErrorCode::ParseError, "interaction label must be 0 or 1");
        out.push_back({u, a, r.label, r.timestamp});
    }
    return out;
}

std::vector<TripleSpec> triple_specs(const KnowledgeGraph& graph) {
    std::vector<TripleSpec> out;
    out.reserve(graph.triple_count());
    for (const auto& t : graph.triples()) {
        out.push_back({graph.entity(t.head).id, t.relation, graph.entity(t.tail).id});
    }
    return out;
}

}  // namespace kgsr::kg
