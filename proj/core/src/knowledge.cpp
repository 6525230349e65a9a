#include "tidykg/knowledge.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <set>

#include <json.hpp>

#include "tidykg/errors.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void KnowledgeBase::add(const std::string& head, const std::string& relation,
                        const std::string& tail, std::uint64_t count) {
    assert(!frozen_);
    if (head.empty() || relation.empty() || tail.empty() || count == 0) return;
    pending_[{head, relation, tail}] += count;
}

void KnowledgeBase::freeze() {
    if (frozen_) return;
    triplets_.reserve(pending_.size());
    for (auto& [key, count] : pending_) {
        triplets_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
    }
    pending_.clear();
    for (std::uint32_t i = 0; i < triplets_.size(); ++i) {
        by_entity_[triplets_[i].head].push_back(i);
        if (triplets_[i].tail != triplets_[i].head) by_entity_[triplets_[i].tail].push_back(i);
    }
    frozen_ = true;
}

std::vector<Triplet> KnowledgeBase::neighbors(const std::string& entity) const {
    std::vector<Triplet> out;
    auto it = by_entity_.find(entity);
    if (it == by_entity_.end()) return out;
    out.reserve(it->second.size());
    for (std::uint32_t i : it->second) out.push_back(triplets_[i]);
    return out;
}

std::vector<std::string> KnowledgeBase::entities() const {
    std::set<std::string> names;
    for (const auto& t : triplets_) {
        names.insert(t.head);
        names.insert(t.tail);
    }
    return {names.begin(), names.end()};
}

KnowledgeStats KnowledgeBase::stats() const {
    KnowledgeStats s;
    std::set<std::string> ents, rels;
    for (const auto& t : triplets_) {
        ents.insert(t.head);
        ents.insert(t.tail);
        rels.insert(t.relation);
    }
    s.n_entities = ents.size();
    s.n_relations = rels.size();
    s.n_triplets = triplets_.size();
    return s;
}

std::vector<std::pair<std::string, std::uint64_t>> KnowledgeBase::relation_histogram(
    std::size_t top_k) const {
    std::map<std::string, std::uint64_t> totals;
    for (const auto& t : triplets_) totals[t.relation] += t.count;
    std::vector<std::pair<std::string, std::uint64_t>> rows(totals.begin(), totals.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (rows.size() > top_k) rows.resize(top_k);
    return rows;
}

bool KnowledgeBase::contains(const std::string& head, const std::string& relation,
                             const std::string& tail) const {
    auto it = by_entity_.find(head);
    if (it == by_entity_.end()) return false;
    for (std::uint32_t i : it->second) {
        const Triplet& t = triplets_[i];
        if (t.head == head && t.relation == relation && t.tail == tail) return true;
    }
    return false;
}

KnowledgeBase load_conceptnet(const std::string& path, SkipReport* report) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open ConceptNet dump: " + path);

    KnowledgeBase kb("conceptnet");
    SkipReport local;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++local.rows_total;
        std::vector<std::string> cols = split(line, '\t');
        if (cols.size() < 5) {
            ++local.malformed;
            continue;
        }
        const std::string& rel_uri = cols[1];
        const std::string& start_uri = cols[2];
        const std::string& end_uri = cols[3];
        if (conceptnet_language(start_uri) != "en" || conceptnet_language(end_uri) != "en") {
            ++local.non_english;
            continue;
        }
        std::string head = normalize_name(conceptnet_term(start_uri));
        std::string tail = normalize_name(conceptnet_term(end_uri));
        std::string rel = camel_to_words(conceptnet_relation(rel_uri));
        if (head.empty() || tail.empty() || rel.empty()) {
            ++local.malformed;
            continue;
        }
        kb.add(head, rel, tail);
        ++local.kept;
    }
    kb.freeze();
    if (report) *report = local;
    return kb;
}

namespace {

// SAX handler for the Visual Genome relationships file. Tracks just enough
// of the structure [{ "relationships": [ {subject, predicate, object} ] }]
// to emit (subject, predicate, object) name triples without building a DOM.
class VgSaxHandler : public json::json_sax_t {
public:
    VgSaxHandler(KnowledgeBase& kb, SkipReport& report) : kb_(kb), report_(report) {}

    bool start_object(std::size_t) override {
        ++depth_;
        if (depth_ == 2 && in_relationships_) {
            // one relationship record
            ++report_.rows_total;
            subject_.clear();
            object_.clear();
            predicate_.clear();
            have_subject_name_ = have_object_name_ = false;
        }
        if (depth_ == 3 && in_relationships_ && (key_ == "subject" || key_ == "object")) {
            party_ = key_;
        }
        return true;
    }

    bool end_object() override {
        if (depth_ == 3 && !party_.empty()) party_.clear();
        if (depth_ == 2 && in_relationships_) emit();
        --depth_;
        return true;
    }

    bool start_array(std::size_t) override {
        ++array_depth_;
        if (depth_ == 1 && key_ == "relationships") in_relationships_ = true;
        if (depth_ == 3 && !party_.empty() && key_ == "names") in_names_ = true;
        return true;
    }

    bool end_array() override {
        --array_depth_;
        if (in_relationships_ && depth_ == 1) in_relationships_ = false;
        if (in_names_ && depth_ == 3) in_names_ = false;
        return true;
    }

    bool key(string_t& val) override {
        key_ = val;
        return true;
    }

    bool string(string_t& val) override {
        if (in_relationships_ && depth_ == 2 && key_ == "predicate") {
            predicate_ = val;
        } else if (!party_.empty() && depth_ == 3) {
            if (key_ == "name" && !val.empty()) set_party_name(val);
            // first entry of a "names" list wins
            if (in_names_ && !has_party_name() && !val.empty()) set_party_name(val);
        }
        return true;
    }

    // Values we do not care about.
    bool null() override { return true; }
    bool boolean(bool) override { return true; }
    bool number_integer(number_integer_t) override { return true; }
    bool number_unsigned(number_unsigned_t) override { return true; }
    bool number_float(number_float_t, const string_t&) override { return true; }
    bool binary(binary_t&) override { return true; }
    bool parse_error(std::size_t position, const std::string&,
                     const nlohmann::detail::exception& ex) override {
        throw DataError("scene-graph JSON parse error at byte " + std::to_string(position) +
                        ": " + ex.what());
    }

private:
    void set_party_name(const std::string& val) {
        if (party_ == "subject") {
            subject_ = val;
            have_subject_name_ = true;
        } else {
            object_ = val;
            have_object_name_ = true;
        }
    }
    bool has_party_name() const {
        return party_ == "subject" ? have_subject_name_ : have_object_name_;
    }

    void emit() {
        std::string head = normalize_name(subject_);
        std::string rel = normalize_name(predicate_);
        std::string tail = normalize_name(object_);
        if (head.empty() || rel.empty() || tail.empty()) {
            ++report_.missing_fields;
            return;
        }
        kb_.add(head, rel, tail);
        ++report_.kept;
    }

    KnowledgeBase& kb_;
    SkipReport& report_;
    int depth_ = 0;          // object nesting: 1 = image record, 2 = relationship
    int array_depth_ = 0;
    bool in_relationships_ = false;
    bool in_names_ = false;
    std::string key_;
    std::string party_;  // "subject" or "object" while inside one
    std::string subject_, object_, predicate_;
    bool have_subject_name_ = false, have_object_name_ = false;
};

}  // namespace

KnowledgeBase load_scenegraph(const std::string& path, SkipReport* report) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scene-graph file: " + path);

    KnowledgeBase kb("scenegraph");
    SkipReport local;
    VgSaxHandler handler(kb, local);
    json::sax_parse(in, &handler);
    kb.freeze();
    if (report) *report = local;
    return kb;
}

KnowledgeBase load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open JSONL file: " + path);

    KnowledgeBase kb("manual");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) {
            throw DataError("invalid JSON on line " + std::to_string(line_no) + " of " + path);
        }
        for (const char* field : {"head", "rel", "tail"}) {
            if (!rec.contains(field) || !rec[field].is_string()) {
                throw DataError("line " + std::to_string(line_no) + " of " + path +
                                ": missing field \"" + field + "\"");
            }
        }
        std::uint64_t count = 1;
        if (rec.contains("count")) {
            if (!rec["count"].is_number_unsigned() || rec["count"].get<std::uint64_t>() == 0) {
                throw DataError("line " + std::to_string(line_no) + " of " + path +
                                ": \"count\" must be a positive integer");
            }
            count = rec["count"].get<std::uint64_t>();
        }
        kb.add(normalize_name(rec["head"].get<std::string>()),
               normalize_name(rec["rel"].get<std::string>()),
               normalize_name(rec["tail"].get<std::string>()), count);
    }
    kb.freeze();
    return kb;
}

KnowledgeBase load_knowledge(const std::string& path, const std::string& format,
                             SkipReport* report) {
    if (format == "conceptnet") return load_conceptnet(path, report);
    if (format == "vg") return load_scenegraph(path, report);
    if (format == "jsonl") return load_jsonl(path);
    throw UsageError("unknown knowledge format: " + format);
}

void save_jsonl(const KnowledgeBase& kb, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write JSONL file: " + path);
    for (const Triplet& t : kb.triplets()) {
        ordered_json rec;
        rec["head"] = t.head;
        rec["rel"] = t.relation;
        rec["tail"] = t.tail;
        rec["count"] = t.count;
        out << rec.dump() << '\n';
    }
}

std::string stats_csv(const KnowledgeBase& kb) {
    KnowledgeStats s = kb.stats();
    std::string csv = "source,metric,value\n";
    csv += kb.source_tag() + ",entities," + std::to_string(s.n_entities) + "\n";
    csv += kb.source_tag() + ",relations," + std::to_string(s.n_relations) + "\n";
    csv += kb.source_tag() + ",triplets," + std::to_string(s.n_triplets) + "\n";
    return csv;
}

}  // namespace tidykg
