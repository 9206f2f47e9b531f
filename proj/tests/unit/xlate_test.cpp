#include <gtest/gtest.h>

#include "hymos/error.hpp"
#include "hymos/net/frame.hpp"
#include "hymos/p4ir/interpreter.hpp"
#include "hymos/p4ir/json_io.hpp"
#include "hymos/p4ir/validate.hpp"
#include "hymos/p4ir/values.hpp"
#include "hymos/xlate/distributed.hpp"
#include "hymos/xlate/encap.hpp"
#include "hymos/xlate/topology.hpp"
#include "hymos/xlate/translate.hpp"
#include "support/random_frames.hpp"
#include "support/test_data.hpp"

namespace hymos::xlate {
namespace {

using hymos::testing::data_file;
using p4ir::Disposition;

struct L3 {
  p4ir::Program program = p4ir::load_program(data_file("l3_router.program.json"));
  std::vector<p4ir::TableEntry> entries = p4ir::load_entries(data_file("l3_router.entries.json"), program);
};

Topology two_by_eight() { return load_topology(data_file("topo_2x8_gen3x8.json")); }

std::vector<uint8_t> udp_frame(const char* dst, std::optional<net::VlanTag> vlan = std::nullopt) {
  net::FrameSpec f;
  f.dst_mac = 0x021111111111;
  f.src_mac = 0x022222222222;
  f.vlan = vlan;
  f.src_ip = p4ir::parse_value("192.0.2.1");
  f.dst_ip = static_cast<uint32_t>(p4ir::parse_value(dst));
  f.src_port = 1;
  f.dst_port = 2;
  return net::build_frame(f);
}

TEST(Topology, LoadsAndMapsPorts) {
  auto t = two_by_eight();
  ASSERT_EQ(t.card_count(), 2u);
  validate_topology(t);
  PortMap m(t);
  EXPECT_EQ(m.locate(3), (PortMap::Location{0, 3}));
  EXPECT_EQ(m.locate(12), (PortMap::Location{1, 4}));
  EXPECT_EQ(m.global(1, 7), 15u);
  EXPECT_FALSE(m.locate(16));
  EXPECT_FALSE(m.locate(1000));
}

TEST(Topology, RejectsInvalidShapes) {
  auto t = two_by_eight();
  auto dup = t;
  dup.cards[1].ports[0].global_id = 0;
  EXPECT_THROW(validate_topology(dup), ValidationError);
  auto one = t;
  one.cards.pop_back();
  EXPECT_THROW(validate_topology(one), ValidationError);
  auto ids = t;
  ids.cards[1].id = 5;
  EXPECT_THROW(validate_topology(ids), ValidationError);
  auto big = t;
  big.cards[0].ports[0].global_id = 256;
  EXPECT_THROW(validate_topology(big), ValidationError);
  auto empty = t;
  empty.cards[1].ports.clear();
  EXPECT_THROW(validate_topology(empty), ValidationError);
  EXPECT_NO_THROW(validate_topology(empty, false));
  EXPECT_THROW(load_topology(R"({"cards": [{"id": 0, "link": {"gen": 3}, "ports": []}]})"), SchemaError);
}

TEST(Translate, EachCardHasThreeExtraTablesAndValidates) {
  L3 l3;
  auto r = translate(l3.program, l3.entries, two_by_eight());
  ASSERT_EQ(r.cards.size(), 2u);
  for (const auto& c : r.cards) {
    EXPECT_EQ(c.program.tables.size(), 6u);
    EXPECT_EQ(c.program.parser.states.size(), l3.program.parser.states.size() + 2);
    EXPECT_EQ(c.program.headers.front().name, kOuterHeader);
    EXPECT_TRUE(p4ir::validate(c.program).empty());
    EXPECT_NO_THROW(p4ir::ProgramInstance(c.program, r.card_entries(c.card, l3.entries)));
  }
}

TEST(Translate, RejectsReservedNames) {
  L3 l3;
  auto p = l3.program;
  p.tables[1].name = "hymos_x";
  for (auto& s : p.ingress) {
    if (auto* i = std::get_if<p4ir::IfStmt>(&s.node)) i->then_block[0] = p4ir::Statement{p4ir::ApplyStmt{"hymos_x"}};
  }
  try {
    translate(p, {}, two_by_eight());
    FAIL() << "expected TranslateError";
  } catch (const TranslateError& e) {
    EXPECT_NE(std::string(e.what()).find("hymos_x"), std::string::npos);
  }
}

TEST(Translate, RejectsEntriesNamingUnknownPorts) {
  L3 l3;
  auto topo = two_by_eight();
  topo.cards[1].ports.pop_back();  // port 15 disappears
  try {
    translate(l3.program, l3.entries, topo);
    FAIL() << "expected TranslateError";
  } catch (const TranslateError& e) {
    EXPECT_NE(std::string(e.what()).find("port 15"), std::string::npos);
  }
}

TEST(Translate, CustomEtherTypeIsUsed) {
  L3 l3;
  auto topo = two_by_eight();
  auto r = translate(l3.program, l3.entries, topo, {0x88B6});
  DistributedSwitch sw(r, topo, l3.entries);
  auto out = sw.process(udp_frame("10.0.12.1"), 3);
  ASSERT_TRUE(out.crossed_fabric);
  EXPECT_TRUE(is_internal_frame(out.fabric_frame, 0x88B6));
  EXPECT_EQ(out.disposition, Disposition::forward(12));
}

TEST(Encap, OuterHeaderBytes) {
  auto inner = udp_frame("10.0.12.1");
  auto f = encapsulate(inner, 3, 12);
  ASSERT_EQ(f.size(), inner.size() + 14);
  std::vector<uint8_t> head(f.begin(), f.begin() + 14);
  std::vector<uint8_t> want = {0x02, 0, 0, 0, 0, 0x0C, 0x02, 0, 0, 0, 0, 0x03, 0x88, 0xB5};
  EXPECT_EQ(head, want);
  EXPECT_TRUE(std::equal(inner.begin(), inner.end(), f.begin() + 14));
}

TEST(Encap, RoundTripForAllPortPairs) {
  auto inner = udp_frame("10.0.1.1");
  for (uint32_t a = 0; a <= 255; ++a) {
    for (uint32_t b = 0; b <= 255; ++b) {
      auto d = decapsulate(encapsulate(inner, a, b));
      ASSERT_EQ(d.orig_ingress_port, a);
      ASSERT_EQ(d.egress_port, b);
      ASSERT_EQ(d.frame, inner);
    }
  }
}

TEST(Encap, InvariantViolations) {
  auto inner = udp_frame("10.0.1.1");
  auto f = encapsulate(inner, 1, 2);
  EXPECT_THROW(encapsulate(f, 1, 2), InvariantError);
  EXPECT_THROW(encapsulate(inner, 256, 2), InvariantError);
  EXPECT_THROW(decapsulate(std::span<const uint8_t>(f.data(), 10)), InvariantError);
  EXPECT_THROW(decapsulate(inner), InvariantError);
}

TEST(Distributed, CardProgramEncapsulatesLikeTheHelper) {
  L3 l3;
  auto topo = two_by_eight();
  auto r = translate(l3.program, l3.entries, topo);
  DistributedSwitch sw(r, topo, l3.entries);
  auto in = udp_frame("10.0.12.1");
  auto out = sw.process(in, 3);
  ASSERT_TRUE(out.crossed_fabric);
  EXPECT_EQ(out.ingress_card, 0u);
  EXPECT_EQ(out.egress_card, 1u);
  auto d = decapsulate(out.fabric_frame);
  EXPECT_EQ(d.orig_ingress_port, 3u);
  EXPECT_EQ(d.egress_port, 12u);
  // The original egress pipeline ran on the ingress card: port 12 gets VLAN 112.
  auto mono = p4ir::execute_pipeline(l3.program, l3.entries, in, 3);
  EXPECT_EQ(d.frame, mono.bytes);
  EXPECT_EQ(out.bytes, mono.bytes);
}

TEST(Distributed, LocalTrafficNeverTouchesTheFabric) {
  L3 l3;
  auto topo = two_by_eight();
  auto r = translate(l3.program, l3.entries, topo);
  DistributedSwitch sw(r, topo, l3.entries);
  for (uint32_t src = 0; src < 8; ++src) {
    auto out = sw.process(udp_frame("10.0.5.9"), src);
    EXPECT_FALSE(out.crossed_fabric);
    EXPECT_EQ(out.disposition, Disposition::forward(5));
  }
}

TEST(Distributed, SpoofedFabricFrameOnPhysicalPortIsDropped) {
  L3 l3;
  auto topo = two_by_eight();
  auto r = translate(l3.program, l3.entries, topo);
  DistributedSwitch sw(r, topo, l3.entries);
  auto spoof = encapsulate(udp_frame("10.0.12.1"), 3, 12);
  EXPECT_EQ(sw.process(spoof, 3).disposition, Disposition::drop());
  // And a plain frame arriving on a virtual port is dropped by the ingress map.
  auto res = sw.card(1).execute(udp_frame("10.0.12.1"), virtual_port(0));
  EXPECT_EQ(res.disposition, Disposition::drop());
}

TEST(Distributed, WrongCardDeliveryIsDetected) {
  L3 l3;
  auto topo = two_by_eight();
  auto r = translate(l3.program, l3.entries, topo);
  DistributedSwitch sw(r, topo, l3.entries);
  // A fabric frame steering to port 4 (card 0) delivered to card 1.
  auto f = encapsulate(udp_frame("10.0.4.1"), 12, 4);
  auto res = sw.card(1).execute(f, virtual_port(0));
  ASSERT_TRUE(res.disposition.is_forward());
  EXPECT_EQ(res.disposition.port, 4u);
  EXPECT_NE(sw.ports().locate(4)->card, 1u);
}

TEST(Distributed, MatchesMonolithicAndNeverLeaksInternalFrames) {
  L3 l3;
  auto topo = load_topology(data_file("topo_4x4_gen3x8.json"));
  auto r = translate(l3.program, l3.entries, topo);
  DistributedSwitch sw(r, topo, l3.entries);
  p4ir::ProgramInstance mono(l3.program, l3.entries);
  hymos::testing::RandomFrameSource src(7, topo.all_ports());
  for (int i = 0; i < 3000; ++i) {
    auto f = src.next();
    auto m = mono.execute(f.bytes, f.ingress_port);
    auto d = sw.process(f.bytes, f.ingress_port);
    // Spoofed fabric frames fail the monolithic parser as well (unknown EtherType).
    ASSERT_EQ(d.disposition, m.disposition) << "packet " << i;
    if (m.disposition.is_forward()) {
      ASSERT_EQ(d.bytes, m.bytes) << "packet " << i;
      ASSERT_FALSE(is_internal_frame(d.bytes));
    }
  }
}

}  // namespace
}  // namespace hymos::xlate
