#ifndef DEEPMPR_EVENT_QUEUE_HPP_
#define DEEPMPR_EVENT_QUEUE_HPP_

#include <cstdint>
#include <memory>
#include <queue>
#include <vector>

#include "deepmpr/common.hpp"
#include "deepmpr/frame.hpp"

namespace deepmpr {

// Declaration order is the tie-break rank for events at equal time.
enum class EventKind : std::uint8_t {
  kTxStart = 0,
  kRxComplete = 1,
  kHelloDue = 2,
  kMobilityTick = 3,
  kFlowArrival = 4,
  kEpisodeEnd = 5,
};

const char* to_string(EventKind kind);

struct Event {
  Seconds time = 0.0;
  EventKind kind = EventKind::kEpisodeEnd;
  NodeId node = 0;
  // RxComplete only: transmitter and the frame on air.
  NodeId from = kNoNode;
  std::shared_ptr<const Frame> frame;
  // Assigned by the queue; final tie-break so equal keys pop in FIFO order.
  std::uint64_t seq = 0;
};

// Single global binary-heap event queue with a monotone clock.
class EventQueue {
 public:
  explicit EventQueue(Seconds episode_length = 100.0);

  Seconds now() const { return now_; }
  Seconds episode_length() const { return episode_length_; }

  // Throws PastEvent if event.time < now().
  void schedule(Event event);

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }

  // Removes the earliest event and advances the clock to its time.
  Event pop();

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const;
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  Seconds now_ = 0.0;
  Seconds episode_length_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace deepmpr

#endif  // DEEPMPR_EVENT_QUEUE_HPP_
