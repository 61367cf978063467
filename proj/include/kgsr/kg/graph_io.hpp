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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgsr/kg/knowledge_graph.hpp"

namespace kgsr::kg {

// Text formats shared by the generator, the CLI and the tests. Every
// reader reports malformed input as ParseError with `origin:line`.

struct RawInteraction {
    std::string user;
    std::string ad;
    int label;
    std::int64_t timestamp;
};

struct AdText {
    std::string ad_id;
    std::string text;
};

struct UserTags {
    std::string user_id;
    std::vector<std::string> tags;
};

std::vector<Entity> read_entities(std::istream& in, const std::string& origin);
std::vector<TripleSpec> read_triples(std::istream& in, const std::string& origin);
std::vector<RawInteraction> read_interactions(std::istream& in, const std::string& origin);
std::vector<AdText> read_ad_texts(std::istream& in, const std::string& origin);
std::vector<UserTags> read_user_tags(std::istream& in, const std::string& origin);

void write_entities(std::ostream& out, const std::vector<Entity>& entities);
void write_triples(std::ostream& out, const std::vector<TripleSpec>& triples);
void write_interactions(std::ostream& out, const std::vector<RawInteraction>& rows);
void write_ad_texts(std::ostream& out, const std::vector<AdText>& rows);
void write_user_tags(std::ostream& out, const std::vector<UserTags>& rows);

std::vector<Entity> load_entities(const std::string& path);
std::vector<TripleSpec> load_triples(const std::string& path);
std::vector<RawInteraction> load_interactions(const std::string& path);
std::vector<AdText> load_ad_texts(const std::string& path);
std::vector<UserTags> load_user_tags(const std::string& path);

/// Resolves string ids against the graph and checks kinds (user must be a
/// User, ad an Ad, label 0 or 1).
std::vector<InteractionRecord> resolve_interactions(const KnowledgeGraph& graph,
                                                    const std::vector<RawInteraction>& raw);

/// Graph triples back in file form.
std::vector<TripleSpec> triple_specs(const KnowledgeGraph& graph);

}  // namespace kgsr::kg
