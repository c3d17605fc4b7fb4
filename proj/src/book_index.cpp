#include "bookrag/book_index.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bookrag/graph_builder.hpp"
#include "bookrag/tree_builder.hpp"

namespace bookrag {

namespace {
constexpr int kIndexFormatVersion = 1;
constexpr char kVectorsMagic[8] = {'B', 'R', 'V', 'C', '0', '0', '0', '1'};
}  // namespace

BookIndex build_index(const DocumentSource& src, ModelGateway& gateway,
                      const BuildConfig& cfg, const PromptLibrary& prompts,
                      BuildStats* stats) {
    if (src.blocks.empty()) throw EmptyDocument("document has no blocks: " + src.doc_id);

    BuildStats local;
    BuildStats& st = stats ? *stats : local;

    const auto verdicts =
        filter_sections(src, gateway, cfg.batch_size, prompts, &st.warnings);

    BookIndex index(gateway.embedding_dim());
    index.doc_id = src.doc_id;
    index.tree = assemble_tree(src, verdicts, &st.warnings);

    const auto image_loader = [&src](const std::string& rel) {
        std::ifstream in(src.base_dir / rel, std::ios::binary);
        if (!in) throw GatewayError("cannot read image: " + rel);
        return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
    };

    std::size_t next_id = 0;
    for (const std::string& node_id : index.tree.document_order()) {
        const TreeNode& node = index.tree.at(node_id);

        NodeExtraction ex;
        try {
            ex = extract_node_subgraph(node, gateway, prompts, image_loader, &st.warnings);
        } catch (const EmptyExtraction& e) {
            warn(&st.warnings, std::string("extraction skipped: ") + e.what());
            ++st.nodes_failed;
            continue;
        } catch (const GatewayError& e) {
            warn(&st.warnings, std::string("extraction failed: ") + e.what());
            ++st.nodes_failed;
            continue;
        } catch (const MalformedVerdict& e) {
            warn(&st.warnings, std::string("extraction unparsable: ") + e.what());
            ++st.nodes_failed;
            continue;
        }

        // resolve entities in extraction order, keeping a local-name map so
        // this node's relations can be remapped to canonical ids
        std::map<std::string, std::string> local_to_canonical;
        for (Entity& e : ex.entities) {
            e.id = "e" + std::to_string(++next_id);
            embed_entity(e, gateway, cfg.resolution.embed_char_budget);
            const std::string local_key = normalize_name(e.name);
            const ResolutionOutcome outcome =
                resolve(std::move(e), index.store, index.graph, gateway, cfg.resolution,
                        prompts, &st.warnings);
            ++st.entities_extracted;
            if (outcome.decision == ResolutionDecision::Merged) ++st.merges;
            local_to_canonical[local_key] = outcome.canonical;
        }
        for (const Relation& r : ex.relations) {
            auto s = local_to_canonical.find(r.source);
            auto t = local_to_canonical.find(r.target);
            if (s == local_to_canonical.end() || t == local_to_canonical.end()) continue;
            if (s->second == t->second) continue;  // merged into the same entity
            index.graph.relations.push_back(
                Relation{s->second, t->second, r.description, r.kind});
        }
    }
    return index;
}

GtLinkView gt_link(const BookIndex& index) {
    GtLinkView view;
    for (const auto& [id, e] : index.graph.entities) {
        view.entity_to_nodes[id] = e.origins;
        for (const std::string& node : e.origins) view.node_to_entities[node].insert(id);
    }
    return view;
}

std::vector<std::string> validate_index(const BookIndex& index) {
    std::vector<std::string> violations = validate_tree(index.tree);
    for (const auto& v : index.graph.validate()) violations.push_back(v);
    for (const auto& [id, e] : index.graph.entities) {
        for (const std::string& node : e.origins) {
            if (!index.tree.has(node))
                violations.push_back("entity " + id + ": origin node '" + node +
                                     "' not in tree");
        }
        if (!index.store.contains(id))
            violations.push_back("entity " + id + " missing from vector store");
        if (e.embedding.size() != index.store.dim())
            violations.push_back("entity " + id + ": embedding dimension mismatch");
    }
    if (index.store.size() != index.graph.entities.size())
        violations.push_back("store size differs from entity count");
    return violations;
}

// --------------------------------------------------------------------------
// persistence
// --------------------------------------------------------------------------

namespace {

nlohmann::json tree_to_json(const DocTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    // root first, then document order: a fixed serialization order makes
    // builds byte-reproducible
    std::vector<std::string> ids{tree.root};
    for (const auto& id : tree.document_order()) ids.push_back(id);
    for (const std::string& id : ids) {
        const TreeNode& n = tree.at(id);
        nlohmann::json j;
        j["id"] = n.id;
        j["type"] = node_type_name(n.type);
        if (n.level) j["level"] = *n.level;
        j["content"] = n.content;
        if (!n.image_path.empty()) j["image_path"] = n.image_path;
        j["page"] = n.page;
        j["order"] = n.order;
        if (n.font_size) j["font_size"] = *n.font_size;
        if (!n.extra.empty()) j["extra"] = n.extra;
        j["parent"] = n.parent;
        j["children"] = n.children;
        nodes.push_back(std::move(j));
    }
    nlohmann::json out;
    out["root"] = tree.root;
    out["nodes"] = std::move(nodes);
    return out;
}

DocTree tree_from_json(const nlohmann::json& j) {
    DocTree tree;
    tree.root = j.at("root").get<std::string>();
    for (const auto& jn : j.at("nodes")) {
        TreeNode n;
        n.id = jn.at("id").get<std::string>();
        n.type = parse_node_type(jn.at("type").get<std::string>());
        if (jn.contains("level")) n.level = jn["level"].get<int>();
        n.content = jn.at("content").get<std::string>();
        if (jn.contains("image_path")) n.image_path = jn["image_path"].get<std::string>();
        n.page = jn.at("page").get<int>();
        n.order = jn.at("order").get<long long>();
        if (jn.contains("font_size")) n.font_size = jn["font_size"].get<double>();
        if (jn.contains("extra")) n.extra = jn["extra"];
        n.parent = jn.at("parent").get<std::string>();
        n.children = jn.at("children").get<std::vector<std::string>>();
        tree.nodes[n.id] = std::move(n);
    }
    return tree;
}

nlohmann::json graph_to_json(const KnowledgeGraph& graph) {
    nlohmann::json entities = nlohmann::json::array();
    for (const auto& [id, e] : graph.entities) {  // std::map: id order
        nlohmann::json j;
        j["id"] = e.id;
        j["name"] = e.name;
        j["type"] = e.entity_type;
        j["description"] = e.description;
        j["origins"] = std::vector<std::string>(e.origins.begin(), e.origins.end());
        entities.push_back(std::move(j));
    }
    nlohmann::json relations = nlohmann::json::array();
    for (const Relation& r : graph.relations) {
        nlohmann::json j;
        j["source"] = r.source;
        j["target"] = r.target;
        j["description"] = r.description;
        if (!r.kind.empty()) j["kind"] = r.kind;
        relations.push_back(std::move(j));
    }
    nlohmann::json out;
    out["entities"] = std::move(entities);
    out["relations"] = std::move(relations);
    return out;
}

KnowledgeGraph graph_from_json(const nlohmann::json& j) {
    KnowledgeGraph graph;
    for (const auto& je : j.at("entities")) {
        Entity e;
        e.id = je.at("id").get<std::string>();
        e.name = je.at("name").get<std::string>();
        e.entity_type = je.at("type").get<std::string>();
        e.description = je.at("description").get<std::string>();
        for (const auto& o : je.at("origins")) e.origins.insert(o.get<std::string>());
        graph.add_entity(std::move(e));
    }
    for (const auto& jr : j.at("relations")) {
        Relation r;
        r.source = jr.at("source").get<std::string>();
        r.target = jr.at("target").get<std::string>();
        r.description = jr.at("description").get<std::string>();
        if (jr.contains("kind")) r.kind = jr["kind"].get<std::string>();
        graph.relations.push_back(std::move(r));
    }
    return graph;
}

void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const std::string& in, std::size_t& pos) {
    if (pos + 8 > in.size()) throw CorruptIndex("vectors.bin truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 8;
    return v;
}

std::uint32_t get_u32_le(const std::string& in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw CorruptIndex("vectors.bin truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 4;
    return v;
}

std::string vectors_to_bytes(const BookIndex& index) {
    static_assert(sizeof(double) == 8, "fixed-width serialization expects 8-byte doubles");
    std::string out;
    out.append(kVectorsMagic, sizeof(kVectorsMagic));
    put_u64_le(out, index.store.size());
    put_u64_le(out, index.store.dim());
    for (const auto& [id, v] : index.store.entries()) {
        put_u32_le(out, static_cast<std::uint32_t>(id.size()));
        out.append(id);
        for (double x : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, sizeof(bits));
            put_u64_le(out, bits);
        }
    }
    return out;
}

void vectors_from_bytes(const std::string& bytes, BookIndex& index) {
    if (bytes.size() < sizeof(kVectorsMagic) ||
        std::memcmp(bytes.data(), kVectorsMagic, sizeof(kVectorsMagic)) != 0)
        throw CorruptIndex("vectors.bin: bad magic");
    std::size_t pos = sizeof(kVectorsMagic);
    const std::uint64_t count = get_u64_le(bytes, pos);
    const std::uint64_t dim = get_u64_le(bytes, pos);
    index.store = VectorStore(static_cast<std::size_t>(dim));
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint32_t id_len = get_u32_le(bytes, pos);
        if (pos + id_len > bytes.size()) throw CorruptIndex("vectors.bin truncated");
        const std::string id = bytes.substr(pos, id_len);
        pos += id_len;
        std::vector<double> v(dim);
        for (std::uint64_t d = 0; d < dim; ++d) {
            const std::uint64_t bits = get_u64_le(bytes, pos);
            std::memcpy(&v[d], &bits, sizeof(bits));
        }
        index.store.add(id, std::move(v));
        if (index.graph.has(id)) index.graph.at(id).embedding = index.store.entries().at(id);
    }
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptIndex("missing index file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

void save_index(const BookIndex& index, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create index directory " + dir.string());

    const std::string tree_bytes = tree_to_json(index.tree).dump(2) + "\n";
    const std::string graph_bytes = graph_to_json(index.graph).dump(2) + "\n";
    const std::string vector_bytes = vectors_to_bytes(index);

    write_file(dir / "tree.json", tree_bytes);
    write_file(dir / "graph.json", graph_bytes);
    write_file(dir / "vectors.bin", vector_bytes);

    nlohmann::json manifest;
    manifest["format_version"] = kIndexFormatVersion;
    manifest["doc_id"] = index.doc_id;
    manifest["embedding_dim"] = index.store.dim();
    manifest["endianness"] = "little";
    manifest["checksums"] = {
        {"tree.json", to_hex64(fnv1a64(tree_bytes))},
        {"graph.json", to_hex64(fnv1a64(graph_bytes))},
        {"vectors.bin", to_hex64(fnv1a64(vector_bytes))},
    };
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

BookIndex load_index(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("index directory not found: " + dir.string());

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw CorruptIndex("manifest.json: " + std::string(e.what()));
    }
    if (!manifest.contains("format_version") ||
        !manifest["format_version"].is_number_integer())
        throw CorruptIndex("manifest.json: missing format_version");
    const int version = manifest["format_version"].get<int>();
    if (version != kIndexFormatVersion)
        throw VersionMismatch("index format_version " + std::to_string(version) +
                              " unsupported (expected " +
                              std::to_string(kIndexFormatVersion) + ")");

    const std::string tree_bytes = read_file(dir / "tree.json");
    const std::string graph_bytes = read_file(dir / "graph.json");
    const std::string vector_bytes = read_file(dir / "vectors.bin");

    if (manifest.contains("checksums")) {
        const auto& sums = manifest["checksums"];
        const auto check = [&](const char* file, const std::string& bytes) {
            if (!sums.contains(file)) throw CorruptIndex(std::string("manifest lacks checksum for ") + file);
            if (sums[file].get<std::string>() != to_hex64(fnv1a64(bytes)))
                throw CorruptIndex(std::string("checksum mismatch for ") + file);
        };
        check("tree.json", tree_bytes);
        check("graph.json", graph_bytes);
        check("vectors.bin", vector_bytes);
    }

    BookIndex index;
    index.doc_id = manifest.value("doc_id", "");
    try {
        index.tree = tree_from_json(nlohmann::json::parse(tree_bytes));
        index.graph = graph_from_json(nlohmann::json::parse(graph_bytes));
    } catch (const nlohmann::json::exception& e) {
        throw CorruptIndex(std::string("index JSON: ") + e.what());
    }
    vectors_from_bytes(vector_bytes, index);

    const auto violations = validate_index(index);
    if (!violations.empty())
        throw CorruptIndex("loaded index is inconsistent: " + violations.front());
    return index;
}

}  // namespace bookrag
