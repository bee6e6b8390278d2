"""Websocket bridge between browser clients and the broker topics.

The operator console never speaks to backends directly; it subscribes and
publishes through this bridge. Messages are JSON envelopes:

    client -> {"op": "sub", "topic": "semcast/<stream>/code"}
    client -> {"op": "pub", "topic": "...", "payload": "<utf-8 text>", "qos": 1}
    server -> {"op": "msg", "topic": "...", "payload": "...", "ts_us": 123}
"""

from __future__ import annotations

import asyncio
import json
import threading

from .transport import LoopbackBroker, LoopbackSession


class WebsocketBridge:
    def __init__(self, broker: LoopbackBroker, host: str = "127.0.0.1", port: int = 8765):
        self.broker = broker
        self.host = host
        self.port = port
        self._server = None

    async def _pump_subscription(self, session: LoopbackSession, topic: str, websocket) -> None:
        sub = session.subscribe(topic)
        loop = asyncio.get_running_loop()
        queue: asyncio.Queue = asyncio.Queue()

        def worker() -> None:
            while True:
                item = sub.get(timeout=0.5)
                if item is not None:
                    loop.call_soon_threadsafe(queue.put_nowait, item)

        threading.Thread(target=worker, daemon=True).start()
        while True:
            payload, receipt = await queue.get()
            envelope = {
                "op": "msg",
                "topic": topic,
                "payload": payload.decode("utf-8"),
                "ts_us": receipt.t_recv_us,
            }
            await websocket.send(json.dumps(envelope))

    async def _handle(self, websocket) -> None:
        session = self.broker.attach("ws-client")
        pumps: list[asyncio.Task] = []
        try:
            async for raw in websocket:
                try:
                    message = json.loads(raw)
                except json.JSONDecodeError:
                    continue
                op = message.get("op")
                if op == "sub" and message.get("topic"):
                    pumps.append(
                        asyncio.create_task(
                            self._pump_subscription(session, message["topic"], websocket)
                        )
                    )
                elif op == "pub" and message.get("topic"):
                    payload = str(message.get("payload", "")).encode("utf-8")
                    session.publish(message["topic"], payload, qos=int(message.get("qos", 1)))
        finally:
            for task in pumps:
                task.cancel()

    async def serve_forever(self) -> None:
        import websockets

        async with websockets.serve(self._handle, self.host, self.port):
            await asyncio.Future()

    def run(self) -> None:
        asyncio.run(self.serve_forever())
