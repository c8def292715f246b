"""HTTP embedding endpoint for the `service:<url>` embedder.

POST {"texts": [...]} -> {"vectors": [[...], ...], "dim": N}

    python tools/embedding_service.py --model sentence-transformers/all-MiniLM-L6-v2 --port 8701
    python tools/embedding_service.py --model sentence-transformers/LaBSE --port 8702

then pass --embedder service:http://127.0.0.1:8701/embed,service:http://127.0.0.1:8702/embed
"""

import argparse

import uvicorn
from fastapi import FastAPI
from pydantic import BaseModel
from sentence_transformers import SentenceTransformer


class EmbedRequest(BaseModel):
    texts: list[str]


def build_app(model_name: str, normalize: bool) -> FastAPI:
    model = SentenceTransformer(model_name)
    dim = model.get_sentence_embedding_dimension()
    app = FastAPI()

    @app.post("/embed")
    def embed(request: EmbedRequest) -> dict:
        vectors = model.encode(request.texts, normalize_embeddings=normalize, convert_to_numpy=True)
        return {"vectors": vectors.astype(float).tolist(), "dim": dim}

    return app


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--model", required=True)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8701)
    parser.add_argument("--no-normalize", action="store_true")
    args = parser.parse_args()
    uvicorn.run(build_app(args.model, not args.no_normalize), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
