// Left-to-right layered placement driven by the service's `layers` payload.

export interface NodePosition {
  x: number;
  y: number;
}

export interface LayoutOptions {
  columnWidth: number;
  rowHeight: number;
  marginX: number;
  marginY: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  columnWidth: 190,
  rowHeight: 150,
  marginX: 90,
  marginY: 90,
};

export interface DagLayout {
  positions: Record<string, NodePosition>;
  width: number;
  height: number;
}

export function layoutFromLayers(layers: string[][], options: LayoutOptions = DEFAULT_LAYOUT): DagLayout {
  const positions: Record<string, NodePosition> = {};
  const deepest = Math.max(1, ...layers.map((layer) => layer.length));
  const totalHeight = (deepest - 1) * options.rowHeight;
  layers.forEach((layer, column) => {
    const columnHeight = (layer.length - 1) * options.rowHeight;
    const offset = (totalHeight - columnHeight) / 2;
    layer.forEach((node, row) => {
      positions[node] = {
        x: options.marginX + column * options.columnWidth,
        y: options.marginY + offset + row * options.rowHeight,
      };
    });
  });
  return {
    positions,
    width: options.marginX * 2 + (layers.length - 1) * options.columnWidth,
    height: options.marginY * 2 + totalHeight,
  };
}
